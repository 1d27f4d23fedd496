#include "torusns/initial_data.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "torusns/fft.hpp"
#include "torusns/operators.hpp"
#include "torusns/spectral.hpp"

namespace torusns {
namespace {

bool canonical(const Wavevector& k) {
  // Exactly one of k and -k passes (k != 0): first nonzero entry positive.
  for (int d = 0; d < kMaxDim; ++d) {
    if (k[d] != 0) return k[d] > 0;
  }
  return false;
}

}  // namespace

SpectralVector taylor_green(const TorusGrid& grid) {
  RealVector u;
  if (grid.dim() == 2) {
    u = RealVector({RealField::sample(grid, [](auto x) { return std::cos(x[0]) * std::sin(x[1]); }),
                    RealField::sample(grid, [](auto x) { return -std::sin(x[0]) * std::cos(x[1]); })});
  } else {
    u = RealVector({RealField::sample(grid, [](auto x) { return std::cos(x[0]) * std::sin(x[1]) * std::sin(x[2]); }),
                    RealField::sample(grid, [](auto x) { return -std::sin(x[0]) * std::cos(x[1]) * std::sin(x[2]); }),
                    RealField(grid)});
  }
  // The exact coefficients are +-1/4 or +-1/8; clear transform round-off so
  // the field is band-limited to |k|_inf = 1.
  auto f = forward_transform(u);
  for (auto& c : f) {
    for (auto& z : c.coeffs()) {
      if (std::abs(z) < 1e-12) z = 0.0;
    }
  }
  return f;
}

SpectralVector taylor_green(const TorusGrid& grid, double amplitude) {
  return normalize_sup(taylor_green(grid), amplitude);
}

SpectralVector random_modes(const TorusGrid& grid, std::uint64_t seed, int max_wavenumber) {
  if (max_wavenumber < 1 || max_wavenumber >= grid.nyquist()) {
    throw std::invalid_argument("random_modes: max_wavenumber must be in [1, M/2)");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto u = SpectralVector::zeros(grid);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    auto k = grid.wavevector(idx);
    if (!canonical(k)) continue;
    bool inside = true;
    for (int d = 0; d < grid.dim(); ++d) inside = inside && std::abs(k[d]) <= max_wavenumber;
    if (!inside) continue;
    std::size_t conj = grid.conjugate_index(idx);
    for (auto& c : u) {
      Complex z(normal(rng), normal(rng));
      c[idx] = z;
      c[conj] = std::conj(z);
    }
  }
  return u;
}

SpectralVector normalize_sup(SpectralVector f, double amplitude) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("initial field: amplitude must be > 0 (got " + std::to_string(amplitude) + ")");
  double s = sup_norm(f);
  if (!(s > 0.0)) throw std::invalid_argument("initial field: cannot normalize a zero field");
  f *= amplitude / s;
  return f;
}

SpectralVector random_bandlimited(const TorusGrid& grid, std::uint64_t seed, int max_wavenumber, double amplitude) {
  auto u = random_modes(grid, seed, max_wavenumber);
  leray_project_in_place(u);
  return normalize_sup(std::move(u), amplitude);
}

SpectralField dilate(const SpectralField& f, int lambda, double factor, const TorusGrid& target) {
  if (lambda < 1) throw std::invalid_argument("dilate: lambda must be a positive integer");
  const auto& src = f.grid();
  if (src.dim() != target.dim()) throw std::invalid_argument("dilate: dimension mismatch");
  SpectralField out(target);
  for (std::size_t idx = 0; idx < src.size(); ++idx) {
    if (f[idx] == Complex{}) continue;
    auto k = src.wavevector(idx);
    for (int d = 0; d < src.dim(); ++d) {
      if (k[d] == src.nyquist()) throw std::invalid_argument("dilate: source has Nyquist content");
      k[d] *= lambda;
    }
    std::size_t dst = target.index_of(k);
    bool nyq = false;
    for (int d = 0; d < target.dim(); ++d) nyq = nyq || k[d] == target.nyquist();
    if (dst == target.size() || nyq) throw std::invalid_argument("dilate: mode leaves the target lattice");
    out[dst] = factor * f[idx];
  }
  return out;
}

SpectralVector dilate(const SpectralVector& f, int lambda, double factor, const TorusGrid& target) {
  std::vector<SpectralField> comps;
  for (const auto& c : f) comps.push_back(dilate(c, lambda, factor, target));
  return SpectralVector(std::move(comps));
}

SpectralVector make_initial_field(const TorusGrid& grid, const InitialSpec& spec) {
  switch (spec.kind) {
    case InitialKind::taylor_green: return taylor_green(grid, spec.amplitude);
    case InitialKind::random_bandlimited:
      return random_bandlimited(grid, spec.seed, spec.max_wavenumber, spec.amplitude);
  }
  throw std::logic_error("make_initial_field: bad kind");
}

}  // namespace torusns
