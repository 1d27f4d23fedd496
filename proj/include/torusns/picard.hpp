#pragma once

#include <vector>

#include "torusns/field.hpp"
#include "torusns/solver.hpp"

namespace torusns {

struct PicardResult {
  /// Final iterate at time t.
  SpectralVector u;
  /// increments[m] = max over nodes of |u^(m+1) - u^(m)|_inf.
  std::vector<double> increments;
  /// Set when an increment grew above the round-off floor.
  bool diverged = false;
  std::vector<double> nodes;
};

/// Fixed-point iteration u^(m+1)(s) = e^{s Lap} f + int_0^s e^{(s-r) Lap} N(u^(m)(r)) dr
/// with u^(0)(s) = e^{s Lap} f. Iterates live on `quadrature_nodes`
/// Gauss-Legendre nodes in [0, t]; the integrals use exponential weights of the
/// interpolating polynomial through the node values, so they are exact in the
/// linear part. Throws std::invalid_argument for t <= 0, iterations < 1,
/// quadrature_nodes < 2, or t > 0.1 / |f|_inf^2.
PicardResult picard_solve(const SpectralVector& f, double t, int iterations, int quadrature_nodes,
                          const Dynamics& dynamics = Dynamics::navier_stokes());

/// |u(T) - e^{T Lap} f - int_0^T e^{(T-s) Lap} N(u(s)) ds|_inf over the stored
/// samples, integrated by composite Simpson. Throws std::invalid_argument with
/// fewer than 3 samples or non-uniform sample spacing.
double duhamel_residual(const Trajectory& traj);

}  // namespace torusns
