#include "torusns/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "assembly.hpp"
#include "torusns/fft.hpp"
#include "torusns/kernels.hpp"
#include "torusns/spectral.hpp"

namespace torusns {

Wavevector odd_symbol_wavevector(const TorusGrid& grid, const Wavevector& k) {
  Wavevector out = k;
  for (int d = 0; d < grid.dim(); ++d) {
    if (k[d] == grid.nyquist()) out[d] = 0;
  }
  return out;
}

namespace {

inline double norm2(const Wavevector& k) {
  return static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1] +
         static_cast<double>(k[2]) * k[2];
}

// v <- (I - kk^T/|k|^2) v for one mode; identity when the odd-symbol wavevector vanishes.
inline void project_mode(const TorusGrid& g, const Wavevector& k, Complex* v, int n) {
  auto kt = odd_symbol_wavevector(g, k);
  double kk = norm2(kt);
  if (kk == 0.0) return;
  Complex dot{0.0, 0.0};
  for (int d = 0; d < n; ++d) dot += static_cast<double>(kt[d]) * v[d];
  dot /= kk;
  for (int d = 0; d < n; ++d) v[d] -= static_cast<double>(kt[d]) * dot;
}

void check_time(double t) {
  if (!(t >= 0.0)) {
    throw std::invalid_argument("heat semigroup: t must be >= 0 (got " + std::to_string(t) + ")");
  }
}

}  // namespace

namespace detail {

std::vector<std::vector<double>> to_physical(const SpectralVector& u) {
  const auto& g = u.grid();
  std::vector<std::vector<double>> out;
  HalfSpectrum half(g.half_size());
  for (const auto& c : u) {
    std::vector<double> v(g.size());
    fft::full_to_half(g, c.coeffs(), half);
    fft::c2r(g, half, v);
    out.push_back(std::move(v));
  }
  return out;
}

void derivative_to_physical(const SpectralField& u, int axis, HalfSpectrum& half, std::vector<double>& out) {
  const auto& g = u.grid();
  auto src = u.coeffs();
  const int nyq = g.nyquist();
  kernels::for_each_half_mode(g, [&](std::size_t h, std::size_t f, const Wavevector& k) {
    int ka = k[axis] == nyq ? 0 : k[axis];
    half[h] = Complex(0.0, static_cast<double>(ka)) * src[f];
  });
  fft::c2r(g, half, out);
}

HalfSpectrum to_half(const TorusGrid& grid, const std::vector<double>& values) {
  HalfSpectrum half(grid.half_size());
  fft::r2c(grid, values, half);
  return half;
}

SpectralVector finish_projected(const TorusGrid& g, std::vector<HalfSpectrum>& half, bool dealias,
                                bool project, double sign) {
  const int n = static_cast<int>(half.size());
  kernels::for_each_half_mode(g, [&](std::size_t h, std::size_t, const Wavevector& k) {
    Complex v[kMaxDim];
    if (dealias && !survives_dealiasing(g, k)) {
      for (int c = 0; c < n; ++c) half[c][h] = 0.0;
      return;
    }
    for (int c = 0; c < n; ++c) v[c] = half[c][h];
    if (project) project_mode(g, k, v, n);
    for (int c = 0; c < n; ++c) half[c][h] = sign * v[c];
  });
  std::vector<SpectralField> comps;
  for (int c = 0; c < n; ++c) {
    SpectralField f(g);
    fft::half_to_full(g, half[c], f.coeffs());
    comps.push_back(std::move(f));
  }
  return SpectralVector(std::move(comps));
}

}  // namespace detail

SpectralField apply_heat_semigroup(const SpectralField& f, double t) {
  check_time(t);
  SpectralField out = f;
  if (t == 0.0) return out;
  auto c = out.coeffs();
  kernels::for_each_mode(f.grid(), [&](std::size_t idx, const Wavevector& k) { c[idx] *= std::exp(-norm2(k) * t); });
  return out;
}

void apply_heat_semigroup_in_place(SpectralVector& f, double t) {
  check_time(t);
  if (t == 0.0) return;
  const auto& g = f.grid();
  kernels::for_each_mode(g, [&](std::size_t idx, const Wavevector& k) {
    double factor = std::exp(-norm2(k) * t);
    for (auto& comp : f) comp[idx] *= factor;
  });
}

SpectralVector apply_heat_semigroup(const SpectralVector& f, double t) {
  SpectralVector out = f;
  apply_heat_semigroup_in_place(out, t);
  return out;
}

SpectralField riesz_transform(const SpectralField& f, int axis) {
  const auto& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("riesz_transform: axis out of range");
  SpectralField out(g);
  auto src = f.coeffs();
  auto dst = out.coeffs();
  kernels::for_each_mode(g, [&](std::size_t idx, const Wavevector& k) {
    auto kt = odd_symbol_wavevector(g, k);
    double kk = norm2(kt);
    dst[idx] = kk == 0.0 ? Complex{} : Complex(0.0, kt[axis] / std::sqrt(kk)) * src[idx];
  });
  return out;
}

void leray_project_in_place(SpectralVector& u) {
  const auto& g = u.grid();
  const int n = u.size();
  if (n != g.dim()) throw std::invalid_argument("leray_project: need dim components");
  kernels::for_each_mode(g, [&](std::size_t idx, const Wavevector& k) {
    Complex v[kMaxDim];
    for (int c = 0; c < n; ++c) v[c] = u[c][idx];
    project_mode(g, k, v, n);
    for (int c = 0; c < n; ++c) u[c][idx] = v[c];
  });
}

SpectralVector leray_project(const SpectralVector& u) {
  SpectralVector out = u;
  leray_project_in_place(out);
  return out;
}

namespace {

// Dealiased spectra of u_i u_j for i <= j, packed row-major over the upper triangle.
std::vector<SpectralField> product_spectra(const SpectralVector& u) {
  const auto& g = u.grid();
  const int n = u.size();
  auto phys = detail::to_physical(u);
  std::vector<SpectralField> out;
  std::vector<double> prod(g.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      kernels::for_each_index(g.size(), [&](std::size_t p) { prod[p] = phys[i][p] * phys[j][p]; });
      auto half = detail::to_half(g, prod);
      SpectralField f(g);
      fft::half_to_full(g, half, f.coeffs());
      dealias_in_place(f);
      out.push_back(std::move(f));
    }
  }
  return out;
}

int pair_index(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

}  // namespace

PressureSolve pressure_from_velocity(const SpectralVector& u) {
  const auto& g = u.grid();
  const int n = u.size();
  auto products = product_spectra(u);
  SpectralField p(g);
  auto dst = p.coeffs();
  kernels::for_each_mode(g, [&](std::size_t idx, const Wavevector& k) {
    double kk = norm2(k);
    if (kk == 0.0) {
      dst[idx] = 0.0;
      return;
    }
    // Second-derivative symbols; mixed pairs use the odd-symbol wavevector.
    auto kt = odd_symbol_wavevector(g, k);
    Complex s{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double kij = i == j ? static_cast<double>(k[i]) * k[i] : static_cast<double>(kt[i]) * kt[j];
        s += kij * products[pair_index(i, j, n)][idx];
      }
    }
    dst[idx] = -s / kk;
  });
  PressureSolve out;
  out.pressure = inverse_transform(p);
  out.divergence_residual = sup_norm(divergence(u));
  out.divergence_warning = out.divergence_residual > 1e-8 * std::max(1.0, sup_norm(u));
  return out;
}

RealField pressure_via_riesz(const SpectralVector& u) {
  const auto& g = u.grid();
  const int n = u.size();
  auto products = product_spectra(u);
  SpectralField p(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      p += riesz_transform(riesz_transform(products[pair_index(i, j, n)], j), i);
    }
  }
  return inverse_transform(p);
}

SpectralVector nonlinear_term(const SpectralVector& u, bool dealias) {
  const auto& g = u.grid();
  const int n = u.size();
  auto phys = detail::to_physical(u);
  std::vector<std::vector<double>> adv(n, std::vector<double>(g.size(), 0.0));
  detail::HalfSpectrum half(g.half_size());
  std::vector<double> du(g.size());
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < n; ++c) {
      detail::derivative_to_physical(u[c], i, half, du);
      auto& a = adv[c];
      const auto& ui = phys[i];
      kernels::for_each_index(g.size(), [&](std::size_t p) { a[p] += ui[p] * du[p]; });
    }
  }
  std::vector<detail::HalfSpectrum> halves;
  for (int c = 0; c < n; ++c) halves.push_back(detail::to_half(g, adv[c]));
  return detail::finish_projected(g, halves, dealias, true, -1.0);
}

SpectralVector nonlinear_term_divergence_form(const SpectralVector& u, bool dealias) {
  const auto& g = u.grid();
  const int n = u.size();
  auto phys = detail::to_physical(u);
  std::vector<detail::HalfSpectrum> prod_half;
  std::vector<double> prod(g.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      kernels::for_each_index(g.size(), [&](std::size_t p) { prod[p] = phys[i][p] * phys[j][p]; });
      prod_half.push_back(detail::to_half(g, prod));
    }
  }
  std::vector<detail::HalfSpectrum> halves(n, detail::HalfSpectrum(g.half_size()));
  const int nyq = g.nyquist();
  kernels::for_each_half_mode(g, [&](std::size_t h, std::size_t, const Wavevector& k) {
    for (int c = 0; c < n; ++c) {
      Complex s{0.0, 0.0};
      for (int i = 0; i < n; ++i) {
        int ki = k[i] == nyq ? 0 : k[i];
        s += Complex(0.0, static_cast<double>(ki)) * prod_half[pair_index(i, c, n)][h];
      }
      halves[c][h] = s;
    }
  });
  return detail::finish_projected(g, halves, dealias, true, -1.0);
}

}  // namespace torusns
