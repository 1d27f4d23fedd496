#pragma once

#include <array>
#include <vector>

#include "torusns/field.hpp"

namespace torusns {

/// a[c][j][l]: component c of a quadratic form g(u)_c = sum_jl a[c][j][l] u_j u_l.
using QuadraticTensor = std::array<std::array<std::array<double, kMaxDim>, kMaxDim>, kMaxDim>;

/// One summand D_axis P g(u) of the right-hand side.
struct GTerm {
  int axis = 0;
  QuadraticTensor a{};
};

/// Quadratic nonlinearity of u_t = Laplacian u + sum_terms D_axis P g_term(u).
class GSpec {
 public:
  /// Throws std::invalid_argument if dim is not 1..3, terms is empty or an axis is out of range.
  GSpec(int dim, std::vector<GTerm> terms);

  /// Terms g^(i)(u) = -u_i u for i = 0..dim-1, whose sum is -P((u.grad) u) on
  /// divergence-free u.
  static GSpec navier_stokes(int dim);

  int dim() const { return dim_; }
  const std::vector<GTerm>& terms() const { return terms_; }

  /// Upper bound for both |g(u)| <= C_g |u|^2 and |g_u(u)| <= C_g |u|,
  /// recomputed from the coefficients by singular values.
  double c_g() const { return c_g_; }

  /// g_term(u) at one point.
  std::array<double, kMaxDim> evaluate(int term, const std::array<double, kMaxDim>& u) const;

  /// sum_terms D_axis P g_term(u). With project = false the P is dropped.
  SpectralVector rhs(const SpectralVector& u, bool dealias = true, bool project = true) const;

 private:
  int dim_ = 0;
  std::vector<GTerm> terms_;
  double c_g_ = 0.0;
};

/// Operator-norm bound for one term: max of the spectral norm of a as a
/// dim x dim^2 matrix and twice that of its (j,l)-symmetrization.
double quadratic_form_bound(int dim, const QuadraticTensor& a);

}  // namespace torusns
