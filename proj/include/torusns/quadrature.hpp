#pragma once

#include <functional>
#include <span>
#include <vector>

namespace torusns {

/// Nodes ascending; weights positive.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point rule exact for polynomials of degree 2n-1 against
/// (1-x)^alpha (1+x)^beta on [-1, 1]. Requires alpha, beta > -1 and n >= 1.
QuadratureRule gauss_jacobi(int n, double alpha, double beta);

/// gauss_jacobi(n, 0, 0).
QuadratureRule gauss_legendre(int n);

/// Gauss-Legendre mapped affinely to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// int_0^t (t-s)^alpha s^beta fn(s) ds by an n-point Gauss-Jacobi rule.
double singular_integral(const std::function<double(double)>& fn, double t, double alpha, double beta, int n);

/// Weights for composite Simpson on `samples` equispaced points with spacing h.
/// An odd number of intervals closes with a 3/8 panel. Needs samples >= 3.
std::vector<double> composite_simpson_weights(std::size_t samples, double h);

}  // namespace torusns
