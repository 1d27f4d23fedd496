#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "torusns/field.hpp"
#include "torusns/gspec.hpp"
#include "torusns/operators.hpp"

namespace torusns {

/// Right-hand side N in u_t = Laplacian u + N(u).
class Dynamics {
 public:
  enum class Kind { navier_stokes, g_system, heat };

  static Dynamics navier_stokes(NonlinearForm form = NonlinearForm::advective, bool dealias = true);
  static Dynamics g_system(GSpec spec, bool dealias = true);
  static Dynamics heat();

  Kind kind() const { return kind_; }
  NonlinearForm form() const { return form_; }
  const GSpec* gspec() const { return gspec_.get(); }
  bool is_linear() const { return kind_ == Kind::heat; }
  bool dealias() const { return dealias_; }

  SpectralVector operator()(const SpectralVector& u) const;

 private:
  Kind kind_ = Kind::heat;
  NonlinearForm form_ = NonlinearForm::advective;
  bool dealias_ = true;
  std::shared_ptr<const GSpec> gspec_;
};

struct SolverConfig {
  int dim = 3;
  int modes = 32;
  /// Empty: 0.25 / (max |k|^2 + kmax * max |u_hat|) from the initial data.
  std::optional<double> dt;
  /// 1, 2 or 4 (integrating-factor Euler, Heun, classical RK4).
  int order = 4;
  double end_time = 1.0;
  /// Two-thirds truncation of the nonlinear term.
  bool dealias = true;
  /// Empty: 1e4 * |f|_inf.
  std::optional<double> blowup_threshold;
  /// Store the full field every this many steps (0: initial and final only).
  int snapshot_every = 0;
  /// Record diagnostics every this many steps (0: at snapshots only).
  int diagnostics_every = 1;
  /// Highest derivative order in diagnostics.
  int j_max = 3;
  NonlinearForm form = NonlinearForm::advective;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  TorusGrid grid() const;
};

struct Diagnostics {
  double t = 0.0;
  double sup_u = 0.0;
  /// dj_sup[j-1] = |D^j u|_inf for j = 1..j_max.
  std::vector<double> dj_sup;
  double divergence_residual = 0.0;
  double energy = 0.0;
};

struct Sample {
  double t = 0.0;
  SpectralVector u;
};

struct Trajectory {
  Dynamics dynamics;
  double dt = 0.0;
  int j_max = 0;
  std::vector<Sample> samples;
  std::vector<Diagnostics> diagnostics;
  bool terminated_early = false;
  std::string termination_reason;
  /// Time of the step that crossed the blow-up threshold.
  double termination_time = 0.0;
  /// Largest |u|_inf seen on any step.
  double max_sup = 0.0;

  const Sample& initial() const { return samples.front(); }
  const Sample& final() const { return samples.back(); }
};

/// Precomputed exponential factors for one step size.
class Stepper {
 public:
  Stepper(const TorusGrid& grid, double dt, int order, Dynamics dynamics);

  double dt() const { return dt_; }
  /// u at t + dt from u at t.
  SpectralVector step(const SpectralVector& u) const;

 private:
  void apply(std::vector<double> const& factor, SpectralVector& v) const;

  TorusGrid grid_;
  double dt_;
  int order_;
  Dynamics dynamics_;
  std::vector<double> full_;  // exp(-|k|^2 dt)
  std::vector<double> half_;  // exp(-|k|^2 dt / 2)
};

/// One integrating-factor step of the configured order.
SpectralVector step(const SpectralVector& u, double dt, const Dynamics& dynamics, int order = 4);

double default_time_step(const SpectralVector& f, bool dealias);

Diagnostics measure(const SpectralVector& u, double t, int j_max);

/// Navier-Stokes from divergence-free f. Throws std::invalid_argument if f
/// does not match the grid or is not divergence-free.
Trajectory simulate(const SpectralVector& f, const SolverConfig& cfg);

/// u_t = Laplacian u + sum D_i P g(u); the state is not re-projected.
Trajectory simulate_g_system(const SpectralVector& f, const GSpec& g, const SolverConfig& cfg);

/// Any dynamics; simulate and simulate_g_system forward here.
Trajectory integrate(const SpectralVector& f, const Dynamics& dynamics, const SolverConfig& cfg);

/// CSV columns t, sup_u, d1_sup..dJ_sup, divergence_residual, energy.
void write_trace_csv(std::ostream& os, const Trajectory& traj);

}  // namespace torusns
