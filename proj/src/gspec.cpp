#include "torusns/gspec.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/SVD>

#include "assembly.hpp"
#include "torusns/kernels.hpp"

namespace torusns {

double quadratic_form_bound(int dim, const QuadraticTensor& a) {
  Eigen::MatrixXd full(dim, dim * dim);
  Eigen::MatrixXd sym(dim, dim * dim);
  for (int c = 0; c < dim; ++c) {
    for (int j = 0; j < dim; ++j) {
      for (int l = 0; l < dim; ++l) {
        full(c, j * dim + l) = a[c][j][l];
        sym(c, j * dim + l) = 0.5 * (a[c][j][l] + a[c][l][j]);
      }
    }
  }
  // |g(u)| = |A (u (x) u)| <= |A| |u|^2 and g_u(u) v = 2 S (u (x) v).
  double s_full = Eigen::JacobiSVD<Eigen::MatrixXd>(full).singularValues()(0);
  double s_sym = Eigen::JacobiSVD<Eigen::MatrixXd>(sym).singularValues()(0);
  return std::max(s_full, 2.0 * s_sym);
}

GSpec::GSpec(int dim, std::vector<GTerm> terms) : dim_(dim), terms_(std::move(terms)) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("GSpec: dim must be 1..3");
  if (terms_.empty()) throw std::invalid_argument("GSpec: need at least one term");
  for (const auto& t : terms_) {
    if (t.axis < 0 || t.axis >= dim) throw std::invalid_argument("GSpec: term axis out of range");
    c_g_ += quadratic_form_bound(dim, t.a);
  }
}

GSpec GSpec::navier_stokes(int dim) {
  std::vector<GTerm> terms;
  for (int i = 0; i < dim; ++i) {
    GTerm t;
    t.axis = i;
    for (int c = 0; c < dim; ++c) t.a[c][i][c] = -1.0;
    terms.push_back(t);
  }
  return GSpec(dim, std::move(terms));
}

std::array<double, kMaxDim> GSpec::evaluate(int term, const std::array<double, kMaxDim>& u) const {
  const auto& a = terms_.at(static_cast<std::size_t>(term)).a;
  std::array<double, kMaxDim> out{0.0, 0.0, 0.0};
  for (int c = 0; c < dim_; ++c) {
    for (int j = 0; j < dim_; ++j) {
      for (int l = 0; l < dim_; ++l) out[c] += a[c][j][l] * u[j] * u[l];
    }
  }
  return out;
}

SpectralVector GSpec::rhs(const SpectralVector& u, bool dealias, bool project) const {
  const auto& g = u.grid();
  const int n = u.size();
  if (n != dim_ || g.dim() != dim_) throw std::invalid_argument("GSpec::rhs: field shape does not match spec");
  auto phys = detail::to_physical(u);
  // Spectra of u_j u_l for j <= l.
  std::vector<detail::HalfSpectrum> prod_half;
  std::vector<std::array<int, 2>> pairs;
  std::vector<double> prod(g.size());
  for (int j = 0; j < n; ++j) {
    for (int l = j; l < n; ++l) {
      kernels::for_each_index(g.size(), [&](std::size_t p) { prod[p] = phys[j][p] * phys[l][p]; });
      prod_half.push_back(detail::to_half(g, prod));
      pairs.push_back({j, l});
    }
  }
  // Per term, the coefficient of u_j u_l (j <= l) in component c.
  struct Folded {
    int axis;
    std::vector<std::array<double, kMaxDim>> coef;
  };
  std::vector<Folded> folded;
  for (const auto& t : terms_) {
    Folded f{t.axis, std::vector<std::array<double, kMaxDim>>(pairs.size(), {0.0, 0.0, 0.0})};
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      auto [j, l] = pairs[p];
      for (int c = 0; c < n; ++c) f.coef[p][c] = j == l ? t.a[c][j][j] : t.a[c][j][l] + t.a[c][l][j];
    }
    folded.push_back(std::move(f));
  }
  std::vector<detail::HalfSpectrum> halves(n, detail::HalfSpectrum(g.half_size()));
  const int nyq = g.nyquist();
  kernels::for_each_half_mode(g, [&](std::size_t h, std::size_t, const Wavevector& k) {
    for (int c = 0; c < n; ++c) {
      Complex s{0.0, 0.0};
      for (const auto& f : folded) {
        int ka = k[f.axis] == nyq ? 0 : k[f.axis];
        if (ka == 0) continue;
        Complex gc{0.0, 0.0};
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          if (f.coef[p][c] != 0.0) gc += f.coef[p][c] * prod_half[p][h];
        }
        s += Complex(0.0, static_cast<double>(ka)) * gc;
      }
      halves[c][h] = s;
    }
  });
  return detail::finish_projected(g, halves, dealias, project, 1.0);
}

}  // namespace torusns
