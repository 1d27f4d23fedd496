#include "torusns/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace torusns {

QuadratureRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be >= 1");
  if (!(alpha > -1.0) || !(beta > -1.0)) throw std::invalid_argument("gauss_jacobi: alpha, beta must be > -1");
  const double ab = alpha + beta;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  // The k = 0 diagonal and k = 1 off-diagonal are written in cancelled form:
  // the general recurrence is 0/0 there when alpha + beta is 0 or -1.
  J(0, 0) = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    double s = 2.0 * k + ab;
    J(k, k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    J(k, k - 1) = J(k - 1, k) = std::sqrt(b2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                              std::lgamma(ab + 2.0));
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = eig.eigenvalues()(i);
    double v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

QuadratureRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

QuadratureRule gauss_legendre(int n, double a, double b) {
  auto rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = a + half * (rule.nodes[i] + 1.0);
    rule.weights[i] *= half;
  }
  return rule;
}

double singular_integral(const std::function<double(double)>& fn, double t, double alpha, double beta, int n) {
  if (!(t > 0.0)) throw std::invalid_argument("singular_integral: t must be > 0");
  // s = t(1+x)/2 maps (t-s)^alpha s^beta ds to (t/2)^{alpha+beta+1} (1-x)^alpha (1+x)^beta dx.
  auto rule = gauss_jacobi(n, alpha, beta);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * fn(0.5 * t * (1.0 + rule.nodes[i]));
  return std::pow(0.5 * t, alpha + beta + 1.0) * sum;
}

std::vector<double> composite_simpson_weights(std::size_t samples, double h) {
  if (samples < 3) throw std::invalid_argument("composite_simpson_weights: need at least 3 samples");
  std::vector<double> w(samples, 0.0);
  const std::size_t intervals = samples - 1;
  const std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (simpson_end != intervals) {
    const std::size_t i = simpson_end;
    w[i] += 3.0 * h / 8.0;
    w[i + 1] += 9.0 * h / 8.0;
    w[i + 2] += 9.0 * h / 8.0;
    w[i + 3] += 3.0 * h / 8.0;
  }
  return w;
}

}  // namespace torusns
