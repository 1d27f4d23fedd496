#include "torusns/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "torusns/kernels.hpp"
#include "torusns/spectral.hpp"

namespace torusns {

Dynamics Dynamics::navier_stokes(NonlinearForm form, bool dealias) {
  Dynamics d;
  d.kind_ = Kind::navier_stokes;
  d.form_ = form;
  d.dealias_ = dealias;
  return d;
}

Dynamics Dynamics::g_system(GSpec spec, bool dealias) {
  Dynamics d;
  d.kind_ = Kind::g_system;
  d.dealias_ = dealias;
  d.gspec_ = std::make_shared<const GSpec>(std::move(spec));
  return d;
}

Dynamics Dynamics::heat() { return Dynamics{}; }

SpectralVector Dynamics::operator()(const SpectralVector& u) const {
  switch (kind_) {
    case Kind::navier_stokes: return nonlinear_term(u, form_, dealias_);
    case Kind::g_system: return gspec_->rhs(u, dealias_);
    case Kind::heat: {
      std::vector<SpectralField> zero(static_cast<std::size_t>(u.size()), SpectralField(u.grid()));
      return SpectralVector(std::move(zero));
    }
  }
  throw std::logic_error("Dynamics: bad kind");
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("solver config: " + what); };
  if (dim != 2 && dim != 3) fail("dim must be 2 or 3");
  if (modes < 8 || modes % 2 != 0) fail("modes must be even and >= 8");
  if (dt && !(*dt > 0.0)) fail("dt must be > 0");
  if (order != 1 && order != 2 && order != 4) fail("order must be 1, 2 or 4");
  if (!(end_time > 0.0)) fail("end_time must be > 0");
  if (blowup_threshold && !(*blowup_threshold > 0.0)) fail("blowup_threshold must be > 0");
  if (snapshot_every < 0) fail("snapshot_every must be >= 0");
  if (diagnostics_every < 0) fail("diagnostics_every must be >= 0");
  if (j_max < 0) fail("j_max must be >= 0");
}

TorusGrid SolverConfig::grid() const { return TorusGrid::make(dim, modes); }

Stepper::Stepper(const TorusGrid& grid, double dt, int order, Dynamics dynamics)
    : grid_(grid), dt_(dt), order_(order), dynamics_(std::move(dynamics)), full_(grid.size()), half_(grid.size()) {
  if (!(dt > 0.0)) throw std::invalid_argument("Stepper: dt must be > 0");
  if (order != 1 && order != 2 && order != 4) throw std::invalid_argument("Stepper: order must be 1, 2 or 4");
  kernels::for_each_mode(grid, [&](std::size_t idx, const Wavevector& k) {
    double kk = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1] + static_cast<double>(k[2]) * k[2];
    full_[idx] = std::exp(-kk * dt);
    half_[idx] = std::exp(-0.5 * kk * dt);
  });
}

void Stepper::apply(const std::vector<double>& factor, SpectralVector& v) const {
  for (auto& c : v) {
    auto z = c.coeffs();
    kernels::for_each_index(z.size(), [&](std::size_t i) { z[i] *= factor[i]; });
  }
}

SpectralVector Stepper::step(const SpectralVector& u) const {
  const double h = dt_;
  SpectralVector eu = u;
  apply(full_, eu);
  if (dynamics_.is_linear()) return eu;

  auto k1 = dynamics_(u);
  if (order_ == 1) {
    SpectralVector v = u;
    v.axpy(h, k1);
    apply(full_, v);
    return v;
  }
  if (order_ == 2) {
    SpectralVector u2 = u;
    u2.axpy(h, k1);
    apply(full_, u2);
    auto k2 = dynamics_(u2);
    SpectralVector v = u;
    v.axpy(0.5 * h, k1);
    apply(full_, v);
    v.axpy(0.5 * h, k2);
    return v;
  }
  SpectralVector u2 = u;
  u2.axpy(0.5 * h, k1);
  apply(half_, u2);
  auto k2 = dynamics_(u2);

  SpectralVector hu = u;
  apply(half_, hu);
  SpectralVector u3 = hu;
  u3.axpy(0.5 * h, k2);
  auto k3 = dynamics_(u3);

  SpectralVector hk3 = k3;
  apply(half_, hk3);
  SpectralVector u4 = eu;
  u4.axpy(h, hk3);
  auto k4 = dynamics_(u4);

  // E(h)u + h/6 (E(h) k1 + 2 E(h/2)(k2 + k3) + k4)
  apply(full_, k1);
  k2 += k3;
  apply(half_, k2);
  SpectralVector out = eu;
  out.axpy(h / 6.0, k1);
  out.axpy(h / 3.0, k2);
  out.axpy(h / 6.0, k4);
  return out;
}

SpectralVector step(const SpectralVector& u, double dt, const Dynamics& dynamics, int order) {
  return Stepper(u.grid(), dt, order, dynamics).step(u);
}

double default_time_step(const SpectralVector& f, bool dealias) {
  const auto& g = f.grid();
  const double kmax = dealias ? g.dealias_cutoff() : g.nyquist();
  double max_hat = 0.0;
  for (const auto& c : f) {
    for (const auto& z : c.coeffs()) max_hat = std::max(max_hat, std::abs(z));
  }
  return 0.25 / (g.dim() * kmax * kmax + kmax * max_hat);
}

Diagnostics measure(const SpectralVector& u, double t, int j_max) {
  Diagnostics d;
  d.t = t;
  auto norms = dj_sup_norms(u, j_max);
  d.sup_u = norms[0];
  d.dj_sup.assign(norms.begin() + 1, norms.end());
  d.divergence_residual = sup_norm(divergence(u));
  d.energy = energy(u);
  return d;
}

Trajectory integrate(const SpectralVector& f, const Dynamics& dynamics, const SolverConfig& cfg) {
  cfg.validate();
  const auto grid = cfg.grid();
  if (f.grid() != grid || f.size() != grid.dim()) throw std::invalid_argument("integrate: initial field does not match the grid");

  const double f_sup = sup_norm(f);
  const double dt_req = cfg.dt ? *cfg.dt : default_time_step(f, cfg.dealias);
  const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.end_time / dt_req - 1e-9)));
  const double dt = cfg.end_time / static_cast<double>(steps);
  const double bound = cfg.blowup_threshold ? *cfg.blowup_threshold : 1e4 * f_sup;

  Trajectory traj;
  traj.dynamics = dynamics;
  traj.dt = dt;
  traj.j_max = cfg.j_max;
  traj.max_sup = f_sup;
  traj.samples.push_back({0.0, f});
  traj.diagnostics.push_back(measure(f, 0.0, cfg.j_max));

  Stepper stepper(grid, dt, cfg.order, dynamics);
  SpectralVector u = f;
  for (long s = 1; s <= steps; ++s) {
    u = stepper.step(u);
    const double t = s == steps ? cfg.end_time : static_cast<double>(s) * dt;
    const double sup = sup_norm(u);
    bool blown = !std::isfinite(sup) || sup > bound;
    if (std::isfinite(sup)) traj.max_sup = std::max(traj.max_sup, sup);
    bool snap = blown || s == steps || (cfg.snapshot_every > 0 && s % cfg.snapshot_every == 0);
    bool diag = snap || (cfg.diagnostics_every > 0 && s % cfg.diagnostics_every == 0);
    if (snap) traj.samples.push_back({t, u});
    if (diag) traj.diagnostics.push_back(measure(u, t, cfg.j_max));
    if (blown) {
      std::ostringstream why;
      if (std::isfinite(sup)) {
        why << "blow-up: |u|_inf = " << sup << " exceeded threshold " << bound;
      } else {
        why << "blow-up: non-finite state";
      }
      traj.terminated_early = true;
      traj.termination_reason = why.str();
      traj.termination_time = t;
      break;
    }
  }
  return traj;
}

Trajectory simulate(const SpectralVector& f, const SolverConfig& cfg) {
  cfg.validate();
  double div = sup_norm(divergence(f));
  if (div > 1e-9 * std::max(1.0, sup_norm(f))) {
    throw std::invalid_argument("simulate: initial field is not divergence-free (|div f|_inf = " + std::to_string(div) + ")");
  }
  return integrate(f, Dynamics::navier_stokes(cfg.form, cfg.dealias), cfg);
}

Trajectory simulate_g_system(const SpectralVector& f, const GSpec& g, const SolverConfig& cfg) {
  cfg.validate();
  if (g.dim() != cfg.dim) throw std::invalid_argument("simulate_g_system: GSpec dimension does not match the grid");
  return integrate(f, Dynamics::g_system(g, cfg.dealias), cfg);
}

void write_trace_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,sup_u";
  for (int j = 1; j <= traj.j_max; ++j) os << ",d" << j << "_sup";
  os << ",divergence_residual,energy\n";
  auto old = os.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& d : traj.diagnostics) {
    os << d.t << ',' << d.sup_u;
    for (double v : d.dj_sup) os << ',' << v;
    os << ',' << d.divergence_residual << ',' << d.energy << '\n';
  }
  os.precision(old);
}

}  // namespace torusns
