#include "torusns/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "torusns/fft.hpp"
#include "torusns/kernels.hpp"

namespace torusns {
namespace {

Complex ik_power(int k, int a, int nyquist) {
  if (a == 0) return {1.0, 0.0};
  if (k == nyquist && (a % 2) == 1) return {0.0, 0.0};
  double mag = 1.0;
  for (int p = 0; p < a; ++p) mag *= static_cast<double>(k);
  switch (a % 4) {
    case 0: return {mag, 0.0};
    case 1: return {0.0, mag};
    case 2: return {-mag, 0.0};
    default: return {0.0, -mag};
  }
}

// Largest |k_d| over coefficients that are not exactly zero.
int spectral_band(const SpectralVector& u) {
  const auto& g = u.grid();
  int band = 0;
  for (const auto& c : u) {
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      if (c[idx] == Complex{}) continue;
      auto k = g.wavevector(idx);
      for (int d = 0; d < g.dim(); ++d) band = std::max(band, std::abs(k[d]));
    }
  }
  return band;
}

double sqrt_max(const std::vector<double>& acc) {
  return std::sqrt(kernels::max_over(acc.size(), [&](std::size_t i) { return acc[i]; }));
}

}  // namespace

Complex derivative_symbol(const TorusGrid& grid, const Wavevector& k, const MultiIndex& alpha) {
  Complex s{1.0, 0.0};
  for (int d = 0; d < grid.dim(); ++d) s *= ik_power(k[d], alpha[d], grid.nyquist());
  return s;
}

SpectralField spectral_derivative(const SpectralField& f, const MultiIndex& alpha) {
  const auto& g = f.grid();
  SpectralField out(g);
  auto src = f.coeffs();
  auto dst = out.coeffs();
  kernels::for_each_mode(g, [&](std::size_t idx, const Wavevector& k) {
    dst[idx] = derivative_symbol(g, k, alpha) * src[idx];
  });
  return out;
}

SpectralVector spectral_derivative(const SpectralVector& f, const MultiIndex& alpha) {
  std::vector<SpectralField> comps;
  for (const auto& c : f) comps.push_back(spectral_derivative(c, alpha));
  return SpectralVector(std::move(comps));
}

SpectralVector gradient(const SpectralField& f) {
  std::vector<SpectralField> comps;
  for (int d = 0; d < f.grid().dim(); ++d) comps.push_back(spectral_derivative(f, MultiIndex::unit(d)));
  return SpectralVector(std::move(comps));
}

SpectralField divergence(const SpectralVector& u) {
  const auto& g = u.grid();
  SpectralField out(g);
  auto dst = out.coeffs();
  const int n = std::min(u.size(), g.dim());
  kernels::for_each_mode(g, [&](std::size_t idx, const Wavevector& k) {
    Complex s{0.0, 0.0};
    for (int d = 0; d < n; ++d) s += ik_power(k[d], 1, g.nyquist()) * u[d][idx];
    dst[idx] = s;
  });
  return out;
}

double sup_norm(const RealField& f) {
  auto v = f.values();
  return kernels::max_over(v.size(), [&](std::size_t i) { return std::abs(v[i]); });
}

double sup_norm(const SpectralField& f) { return sup_norm(inverse_transform(f)); }

double sup_norm(const RealVector& u) {
  const auto n = u.grid().size();
  return std::sqrt(kernels::max_over(n, [&](std::size_t i) {
    double s = 0.0;
    for (const auto& c : u) s += c[i] * c[i];
    return s;
  }));
}

double sup_norm(const SpectralVector& u) { return dj_sup_norm(u, 0); }

double dj_sup_norm(const SpectralVector& u, int j) {
  if (j < 0) throw std::invalid_argument("dj_sup_norm: j must be >= 0");
  const auto& g = u.grid();
  const int M = g.modes();
  const int H = g.half_last();
  const int K = spectral_band(u);
  const bool banded = 2 * K + 1 < M;
  // Storage indices that can hold data: leading axes {0..K} u {M-K..M-1}, last axis {0..K}.
  std::vector<int> lead;
  for (int i = 0; i < M; ++i) {
    if (!banded || i <= K || i >= M - K) lead.push_back(i);
  }
  const int last = banded ? K + 1 : H;

  std::vector<Complex> half(g.half_size());
  std::vector<double> scratch(g.size());
  std::vector<double> acc(g.size());
  std::array<std::vector<Complex>, kMaxDim> table;
  double best = 0.0;
  for (const auto& alpha : multi_indices(g.dim(), j)) {
    for (int d = 0; d < g.dim(); ++d) {
      table[d].resize(static_cast<std::size_t>(M));
      for (int i = 0; i < M; ++i) table[d][i] = ik_power(g.wavenumber(i), alpha[d], g.nyquist());
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const auto& comp : u) {
      if (banded) {
        kernels::for_each_index(g.size() / static_cast<std::size_t>(M), [&](std::size_t row) {
          std::fill_n(half.begin() + static_cast<std::ptrdiff_t>(row * H), last, Complex{});
        });
      } else {
        std::fill(half.begin(), half.end(), Complex{});
      }
      const Complex* src = comp.coeffs().data();
      kernels::for_each_index(lead.size(), [&](std::size_t a) {
        const int i0 = lead[a];
        if (g.dim() == 2) {
          for (int i1 = 0; i1 < last; ++i1) {
            half[static_cast<std::size_t>(i0) * H + i1] =
                table[0][i0] * table[1][i1] * src[static_cast<std::size_t>(i0) * M + i1];
          }
          return;
        }
        for (int i1 : lead) {
          const Complex f01 = table[0][i0] * table[1][i1];
          const std::size_t row = static_cast<std::size_t>(i0) * M + i1;
          for (int i2 = 0; i2 < last; ++i2) half[row * H + i2] = f01 * table[2][i2] * src[row * M + i2];
        }
      });
      fft::c2r_banded(g, half, scratch, K);
      kernels::for_each_index(acc.size(), [&](std::size_t i) { acc[i] += scratch[i] * scratch[i]; });
    }
    best = std::max(best, sqrt_max(acc));
  }
  return best;
}

std::vector<double> dj_sup_norms(const SpectralVector& u, int j_max) {
  std::vector<double> out;
  for (int j = 0; j <= j_max; ++j) out.push_back(dj_sup_norm(u, j));
  return out;
}

bool survives_dealiasing(const TorusGrid& grid, const Wavevector& k) {
  const int M = grid.modes();
  for (int d = 0; d < grid.dim(); ++d) {
    if (3 * std::abs(k[d]) > M) return false;
  }
  return true;
}

void dealias_in_place(SpectralField& f) {
  const auto& g = f.grid();
  auto c = f.coeffs();
  kernels::for_each_mode(g, [&](std::size_t idx, const Wavevector& k) {
    if (!survives_dealiasing(g, k)) c[idx] = 0.0;
  });
}

void dealias_in_place(SpectralVector& u) {
  for (auto& c : u) dealias_in_place(c);
}

SpectralField dealias(SpectralField f) {
  dealias_in_place(f);
  return f;
}

double energy(const SpectralVector& u) {
  double e = 0.0;
  for (const auto& c : u) {
    for (const auto& z : c.coeffs()) e += std::norm(z);
  }
  return 0.5 * e;
}

std::vector<double> mean_mode(const SpectralVector& u) {
  std::vector<double> out;
  for (const auto& c : u) out.push_back(c[0].real());
  return out;
}

}  // namespace torusns
