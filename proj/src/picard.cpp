#include "torusns/picard.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "torusns/kernels.hpp"
#include "torusns/operators.hpp"
#include "torusns/quadrature.hpp"
#include "torusns/spectral.hpp"

namespace torusns {
namespace {

// L_q(s) for the Lagrange basis on `nodes`.
double lagrange(const std::vector<double>& nodes, std::size_t q, double s) {
  double v = 1.0;
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    if (r != q) v *= (s - nodes[r]) / (nodes[q] - nodes[r]);
  }
  return v;
}

// W[q] = int_0^end exp(-kappa (end - s)) L_q(s) ds. Panels shrink with kappa so
// the boundary layer near `end` is resolved; mass beyond 50/kappa is below 1e-21.
std::vector<double> exponential_weights(const std::vector<double>& nodes, double end, double kappa,
                                        const QuadratureRule& panel_rule) {
  std::vector<double> w(nodes.size(), 0.0);
  double start = 0.0;
  int panels = 1;
  if (kappa > 0.0) {
    start = std::max(0.0, end - 50.0 / kappa);
    panels = std::max(1, static_cast<int>(std::ceil(kappa * (end - start) / 4.0)));
  }
  const double width = (end - start) / panels;
  for (int p = 0; p < panels; ++p) {
    double a = start + p * width;
    for (std::size_t i = 0; i < panel_rule.size(); ++i) {
      double s = a + 0.5 * width * (panel_rule.nodes[i] + 1.0);
      double ws = 0.5 * width * panel_rule.weights[i] * std::exp(-kappa * (end - s));
      for (std::size_t q = 0; q < nodes.size(); ++q) w[q] += ws * lagrange(nodes, q, s);
    }
  }
  return w;
}

int norm2(const Wavevector& k) { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }

}  // namespace

PicardResult picard_solve(const SpectralVector& f, double t, int iterations, int quadrature_nodes,
                          const Dynamics& dynamics) {
  if (!(t > 0.0)) throw std::invalid_argument("picard_solve: t must be > 0");
  if (iterations < 1) throw std::invalid_argument("picard_solve: iterations must be >= 1");
  if (quadrature_nodes < 2) throw std::invalid_argument("picard_solve: quadrature_nodes must be >= 2");
  const double fs = sup_norm(f);
  if (t * fs * fs > 0.1 * (1.0 + 1e-12)) {
    throw std::invalid_argument("picard_solve: t = " + std::to_string(t) + " exceeds 0.1/|f|_inf^2");
  }
  const auto& g = f.grid();
  const int Q = quadrature_nodes;
  auto rule = gauss_legendre(Q, 0.0, t);
  auto panel = gauss_legendre(20);

  // Weight tables per kappa = |k|^2 for the Q interior rows and the endpoint row.
  const int kappa_max = g.max_wavenumber_norm2();
  std::vector<double> table(static_cast<std::size_t>(kappa_max + 1) * (Q + 1) * Q, 0.0);
  std::vector<char> used(static_cast<std::size_t>(kappa_max) + 1, 0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) used[static_cast<std::size_t>(g.wavenumber_norm2(idx))] = 1;
  std::vector<int> kappas;
  for (int kap = 0; kap <= kappa_max; ++kap) {
    if (used[static_cast<std::size_t>(kap)]) kappas.push_back(kap);
  }
  kernels::for_each_index(kappas.size(), [&](std::size_t i) {
    const int kap = kappas[i];
    for (int p = 0; p <= Q; ++p) {
      double end = p < Q ? rule.nodes[static_cast<std::size_t>(p)] : t;
      auto w = exponential_weights(rule.nodes, end, kap, panel);
      std::copy(w.begin(), w.end(), table.begin() + (static_cast<std::ptrdiff_t>(kap) * (Q + 1) + p) * Q);
    }
  });

  std::vector<SpectralVector> free(Q + 1);
  for (int p = 0; p < Q; ++p) free[p] = apply_heat_semigroup(f, rule.nodes[static_cast<std::size_t>(p)]);
  free[Q] = apply_heat_semigroup(f, t);

  PicardResult result;
  result.nodes = rule.nodes;
  std::vector<SpectralVector> iterate(free.begin(), free.end());
  const double floor = 1e-12 * std::max(1.0, fs);
  for (int m = 0; m < iterations; ++m) {
    std::vector<SpectralVector> rhs;
    for (int q = 0; q < Q; ++q) rhs.push_back(dynamics(iterate[static_cast<std::size_t>(q)]));
    std::vector<SpectralVector> next = free;
    const int n = f.size();
    kernels::for_each_mode(g, [&](std::size_t idx, const Wavevector& k) {
      const double* w = &table[static_cast<std::size_t>(norm2(k)) * (Q + 1) * Q];
      for (int p = 0; p <= Q; ++p) {
        for (int c = 0; c < n; ++c) {
          Complex s{0.0, 0.0};
          for (int q = 0; q < Q; ++q) s += w[p * Q + q] * rhs[static_cast<std::size_t>(q)][c][idx];
          next[static_cast<std::size_t>(p)][c][idx] += s;
        }
      }
    });
    double inc = 0.0;
    for (int p = 0; p <= Q; ++p) inc = std::max(inc, sup_norm(next[p] - iterate[p]));
    if (!result.increments.empty() && inc > result.increments.back() && inc > floor) result.diverged = true;
    if (!std::isfinite(inc)) result.diverged = true;
    result.increments.push_back(inc);
    iterate = std::move(next);
  }
  result.u = iterate[static_cast<std::size_t>(Q)];
  return result;
}

double duhamel_residual(const Trajectory& traj) {
  const auto& samples = traj.samples;
  if (samples.size() < 3) {
    throw std::invalid_argument("duhamel_residual: need at least 3 stored samples (got " +
                                std::to_string(samples.size()) + ")");
  }
  const double T = samples.back().t;
  const double h = T / static_cast<double>(samples.size() - 1);
  for (std::size_t m = 0; m < samples.size(); ++m) {
    if (std::abs(samples[m].t - h * static_cast<double>(m)) > 1e-9 * std::max(h, 1e-300)) {
      throw std::invalid_argument("duhamel_residual: samples are not uniformly spaced from t = 0");
    }
  }
  auto weights = composite_simpson_weights(samples.size(), h);
  const auto& f = samples.front().u;
  const auto& g = f.grid();
  const int n = f.size();

  SpectralVector rhs = apply_heat_semigroup(f, T);
  if (!traj.dynamics.is_linear()) {
    for (std::size_t m = 0; m < samples.size(); ++m) {
      auto nl = traj.dynamics(samples[m].u);
      const double s = samples[m].t;
      const double w = weights[m];
      kernels::for_each_mode(g, [&](std::size_t idx, const Wavevector& k) {
        double factor = w * std::exp(-static_cast<double>(norm2(k)) * (T - s));
        for (int c = 0; c < n; ++c) rhs[c][idx] += factor * nl[c][idx];
      });
    }
  }
  return sup_norm(samples.back().u - rhs);
}

}  // namespace torusns
