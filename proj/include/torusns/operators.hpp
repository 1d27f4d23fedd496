#pragma once

#include "torusns/field.hpp"

namespace torusns {

/// Wavevector seen by first-order operators: Nyquist components replaced by 0.
/// Riesz transforms, the Leray projector and divergence all use it, which keeps
/// them mutually consistent and conjugate-symmetric.
Wavevector odd_symbol_wavevector(const TorusGrid& grid, const Wavevector& k);

/// e^{t Laplacian}: coefficient k scaled by exp(-|k|^2 t). Throws for t < 0.
SpectralField apply_heat_semigroup(const SpectralField& f, double t);
SpectralVector apply_heat_semigroup(const SpectralVector& f, double t);
void apply_heat_semigroup_in_place(SpectralVector& f, double t);

/// R_i with symbol i k_i / |k|, zero on the mean mode.
SpectralField riesz_transform(const SpectralField& f, int axis);

/// Per-mode delta_ij - k_i k_j / |k|^2; the mean mode is left unchanged.
SpectralVector leray_project(const SpectralVector& u);
void leray_project_in_place(SpectralVector& u);

struct PressureSolve {
  RealField pressure;
  /// sup norm of div u; the solve assumes it is zero.
  double divergence_residual = 0.0;
  bool divergence_warning = false;
};

/// Zero-mean p with Laplacian p = -div((u.grad) u), from dealiased products u_i u_j.
PressureSolve pressure_from_velocity(const SpectralVector& u);

/// Same pressure assembled as sum_ij R_i R_j (u_i u_j).
RealField pressure_via_riesz(const SpectralVector& u);

/// -P((u.grad) u) (advective form). With `dealias` the result is
/// two-thirds truncated.
SpectralVector nonlinear_term(const SpectralVector& u, bool dealias = true);

/// -sum_i D_i P(u_i u) (divergence form); equal to nonlinear_term when div u = 0.
SpectralVector nonlinear_term_divergence_form(const SpectralVector& u, bool dealias = true);

enum class NonlinearForm { advective, divergence };

inline SpectralVector nonlinear_term(const SpectralVector& u, NonlinearForm form, bool dealias = true) {
  return form == NonlinearForm::advective ? nonlinear_term(u, dealias) : nonlinear_term_divergence_form(u, dealias);
}

}  // namespace torusns
