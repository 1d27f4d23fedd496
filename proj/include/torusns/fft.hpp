#pragma once

#include <span>

#include "torusns/field.hpp"

namespace torusns {

/// Coefficients c_k = M^-n sum_x f(x) exp(-i k.x), so f(x) = exp(i k.x) maps to c_k = 1.
SpectralField forward_transform(const RealField& f);
SpectralVector forward_transform(const RealVector& f);

/// Sum_k c_k exp(i k.x) at the collocation points. The input is read as the
/// spectrum of a real function: only the r2c half of the lattice is used.
RealField inverse_transform(const SpectralField& f);
RealVector inverse_transform(const SpectralVector& f);

namespace fft {

/// Normalized r2c transform into the half-spectrum layout (last axis 0..M/2).
void r2c(const TorusGrid& grid, std::span<const double> in, std::span<Complex> half_out);

/// Unnormalized c2r transform. `half_in` is overwritten.
void c2r(const TorusGrid& grid, std::span<Complex> half_in, std::span<double> out);

/// c2r for a half spectrum that vanishes outside |k|_inf <= band. Only lines
/// that can carry data are transformed along the leading axes. Falls back to
/// c2r when the band reaches the Nyquist index. On the banded path only
/// entries with last-axis index <= band are overwritten; otherwise all of
/// `half_in` may be.
void c2r_banded(const TorusGrid& grid, std::span<Complex> half_in, std::span<double> out, int band);

/// Expands a half spectrum to the full lattice using conjugate symmetry.
void half_to_full(const TorusGrid& grid, std::span<const Complex> half, std::span<Complex> full);

/// Copies the half-layout part of a full spectrum.
void full_to_half(const TorusGrid& grid, std::span<const Complex> full, std::span<Complex> half);

}  // namespace fft
}  // namespace torusns
