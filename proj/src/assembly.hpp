#pragma once

// Shared pieces of the pseudo-spectral right-hand sides (Navier-Stokes and the
// quadratic g-system). Private to the library.

#include <vector>

#include "torusns/field.hpp"

namespace torusns::detail {

using HalfSpectrum = std::vector<Complex>;

/// c2r of every component.
std::vector<std::vector<double>> to_physical(const SpectralVector& u);

/// c2r of D_axis u_c into `out`.
void derivative_to_physical(const SpectralField& u, int axis, HalfSpectrum& half, std::vector<double>& out);

/// Normalized r2c of a physical product.
HalfSpectrum to_half(const TorusGrid& grid, const std::vector<double>& values);

/// Per half-mode: optional two-thirds truncation, Leray projection, scaling by
/// `sign`; then expansion to full spectra.
SpectralVector finish_projected(const TorusGrid& grid, std::vector<HalfSpectrum>& half, bool dealias,
                                bool project, double sign);

}  // namespace torusns::detail
