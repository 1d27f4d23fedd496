#pragma once

#include <vector>

#include "torusns/field.hpp"

namespace torusns {

/// Symbol (ik)^alpha of D^alpha at wavevector k. Zero on any axis where k is
/// the Nyquist index and the derivative order is odd.
Complex derivative_symbol(const TorusGrid& grid, const Wavevector& k, const MultiIndex& alpha);

SpectralField spectral_derivative(const SpectralField& f, const MultiIndex& alpha);
SpectralVector spectral_derivative(const SpectralVector& f, const MultiIndex& alpha);

/// Componentwise gradient of a scalar.
SpectralVector gradient(const SpectralField& f);

/// Sum_i D_i u_i.
SpectralField divergence(const SpectralVector& u);

/// Max over collocation points of |f(x)|.
double sup_norm(const RealField& f);
double sup_norm(const SpectralField& f);

/// Max over collocation points of the Euclidean norm of the component vector.
double sup_norm(const RealVector& u);
double sup_norm(const SpectralVector& u);

/// max over |alpha| = j of sup_norm(D^alpha u).
double dj_sup_norm(const SpectralVector& u, int j);

/// dj_sup_norm for j = 0..j_max in one pass.
std::vector<double> dj_sup_norms(const SpectralVector& u, int j_max);

/// Two-thirds rule: zero every coefficient with |k_d| > M/3 on some axis.
bool survives_dealiasing(const TorusGrid& grid, const Wavevector& k);
void dealias_in_place(SpectralField& f);
void dealias_in_place(SpectralVector& u);
SpectralField dealias(SpectralField f);

/// 1/2 sum_k |u_hat(k)|^2, i.e. half the mean of |u|^2 over the torus.
double energy(const SpectralVector& u);

/// Mean (k = 0) mode of each component.
std::vector<double> mean_mode(const SpectralVector& u);

}  // namespace torusns
