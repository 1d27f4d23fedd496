#pragma once

#include <cstdint>

#include "torusns/field.hpp"

namespace torusns {

/// Taylor-Green vortex. 2D: (cos x1 sin x2, -sin x1 cos x2);
/// 3D: (cos x1 sin x2 sin x3, -sin x1 cos x2 sin x3, 0).
SpectralVector taylor_green(const TorusGrid& grid);

/// Gaussian coefficients on every mode 0 < |k|_inf <= max_wavenumber, seeded
/// deterministically. Not projected and not normalized.
SpectralVector random_modes(const TorusGrid& grid, std::uint64_t seed, int max_wavenumber);

/// Scales f so its sampled sup norm equals `amplitude`. Throws for amplitude <= 0
/// or a zero field.
SpectralVector normalize_sup(SpectralVector f, double amplitude);

/// Leray-projected random_modes scaled to sup norm `amplitude`.
SpectralVector random_bandlimited(const TorusGrid& grid, std::uint64_t seed, int max_wavenumber, double amplitude);

/// taylor_green scaled to sup norm `amplitude`.
SpectralVector taylor_green(const TorusGrid& grid, double amplitude);

/// x -> factor * f(lambda x) on `target`: the coefficient of k moves to lambda k
/// and is multiplied by `factor`. Throws if lambda < 1 or a nonzero mode leaves
/// the target lattice or lands on a Nyquist index.
SpectralVector dilate(const SpectralVector& f, int lambda, double factor, const TorusGrid& target);

/// Same for a scalar.
SpectralField dilate(const SpectralField& f, int lambda, double factor, const TorusGrid& target);

enum class InitialKind { taylor_green, random_bandlimited };

struct InitialSpec {
  InitialKind kind = InitialKind::taylor_green;
  std::uint64_t seed = 1;
  int max_wavenumber = 4;
  double amplitude = 1.0;
};

/// Divergence-free, band-limited, real, with sup norm spec.amplitude.
SpectralVector make_initial_field(const TorusGrid& grid, const InitialSpec& spec);

}  // namespace torusns
