#pragma once

// Empirical constants and verdicts for the sup-norm estimates. Every constant
// is a maximum over an explicitly declared trial family and time grid; nothing
// is extrapolated.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "torusns/field.hpp"
#include "torusns/gspec.hpp"
#include "torusns/solver.hpp"

namespace torusns {

/// `count` points lo, lo r, ..., hi. Throws unless 0 < lo <= hi and count >= 1
/// (count == 1 needs lo == hi).
std::vector<double> geometric_grid(double lo, double hi, int count);

// ---------------------------------------------------------------------------
// Heat semigroup constants

/// ratios[j][i] = t_i^{j/2} |D^j e^{t_i Lap} (P) f|_inf / |f|_inf, j = 0..j_max.
std::vector<std::vector<double>> semigroup_ratios(const SpectralVector& f, int j_max,
                                                  const std::vector<double>& t_grid, bool project);

/// Trial i is random_modes(seed = base_seed + i) scaled to unit sampled sup.
/// The fields are not projected: the plain constant needs general f and the
/// projected one applies P itself.
struct TrialFamily {
  int dim = 3;
  int modes = 32;
  /// Keeps 16 collocation points per shortest wavelength at the default modes.
  int max_wavenumber = 2;
  std::uint64_t base_seed = 1;

  void validate() const;
  SpectralVector field(std::size_t trial) const;
};

struct SemigroupConstants {
  int j_max = 0;
  int trials = 0;
  std::vector<double> t_grid;
  std::vector<std::uint64_t> seeds;
  /// C_j over all trials, j = 0..j_max.
  std::vector<double> plain;
  std::vector<double> projected;
  /// Same maxima over the first half of the trials.
  std::vector<double> plain_half;
  std::vector<double> projected_half;
  /// [j][i]: max over trials at t_grid[i].
  std::vector<std::vector<double>> plain_curve;
  std::vector<std::vector<double>> projected_curve;
  /// max over trials and t of |e^{t Lap} f|_inf / |f|_inf - 1; <= 0 when the
  /// maximum principle holds.
  double max_principle_excess = 0.0;

  /// max over j >= 1 and both variants of |C_j(all) / C_j(half) - 1|.
  double doubling_change() const;
};

/// Trials run concurrently; the fold is in trial order.
SemigroupConstants measure_semigroup_constants(const TrialFamily& family, int j_max, int trial_count,
                                               const std::vector<double>& t_grid);

// ---------------------------------------------------------------------------
// Forced heat equation u_t = Lap u + D_axis P g, u(0) = 0

/// Exact solution at t for time-constant g: mode k is
/// (1 - e^{-|k|^2 t}) / |k|^2 * i k_axis * (P g)^(k).
SpectralVector forced_heat_solution(const SpectralVector& g, int axis, double t);

/// |u(t)|_inf / (t^{1/2} |g|_inf) per t; all zero when g vanishes.
std::vector<double> forcing_ratios(const SpectralVector& g, int axis, const std::vector<double>& t_grid);

struct ForcingFamily {
  int modes = 32;
  /// Band of the random field w; the forcing g_term(w) has twice this band.
  int max_wavenumber = 2;
  std::uint64_t base_seed = 1;
  int t_points = 16;
  /// The t-grid spans [end_time * start_fraction, end_time].
  double start_fraction = 1e-3;

  void validate() const;
};

struct ForcingBound {
  double end_time = 0.0;
  int trials = 0;
  std::vector<double> t_grid;
  std::vector<std::uint64_t> seeds;
  /// [i]: max over trials and terms at t_grid[i].
  std::vector<double> curve;
  /// max of curve: the empirical C.
  double constant = 0.0;
  bool bounded = false;
};

/// Trial forcings are g_term(w) for every term of `spec` with w a unit random
/// divergence-free field; each is paired with the term's derivative axis.
ForcingBound verify_forcing_bound(const GSpec& spec, double end_time, int trials, const ForcingFamily& family);

// ---------------------------------------------------------------------------
// Window constants

/// Constant C bounding V(t) <= C|f| + C t^{1/2} max V^2, assembled from
/// measured pieces: max(1, forcing C, C_1, C_1 with P).
double solution_constant(const SemigroupConstants& semigroup, const ForcingBound& forcing);

/// 1 / (16 C^4).
double solution_window(double C);

/// 1 / (16 C^2 C_g^2).
double g_system_window(double C, double c_g);

struct VSample {
  double t = 0.0;
  double v = 0.0;
};

/// V = |u|_inf + t^{1/2} |Du|_inf at every diagnostics sample. Throws
/// std::invalid_argument if the trajectory has no first-derivative diagnostics.
std::vector<VSample> compute_V(const Trajectory& traj);

// ---------------------------------------------------------------------------
// Solution bounds and amplitude collapse

enum class CollapseFamily {
  /// f_A(x) = lambda base(lambda x) with lambda = A / min(amplitudes), scaled to
  /// sup A. Needs integer amplitude ratios.
  scaling_orbit,
  /// One random profile per seed, scaled to each amplitude.
  fixed_profile,
};

CollapseFamily parse_collapse_family(const std::string& name);
std::string to_string(CollapseFamily family);

struct TheoremBoundsConfig {
  std::vector<double> amplitudes{0.5, 1.0, 2.0, 4.0};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int j_max = 3;
  int dim = 3;
  int modes = 32;
  /// Band of the base profile (before dilation for the scaling orbit).
  int max_wavenumber = 1;
  CollapseFamily family = CollapseFamily::scaling_orbit;
  /// Window constant input; c0 = 1 / (16 C^4).
  double C = 1.0;
  /// Every run takes this many steps, so all runs share one scaled time grid.
  int steps = 256;
  int diagnostics_every = 4;
  /// Per-amplitude K_j must lie within [median / f, f * median].
  double collapse_factor = 2.0;
  /// Bound on K_0.
  double k0_bound = 2.0;
  /// Also integrate the heat equation from every f and compare with semigroup_ratios.
  bool heat_control = true;

  /// Throws std::invalid_argument naming the field.
  void validate() const;
  double c0() const;
};

struct CollapseRun {
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  double end_time = 0.0;
  bool terminated_early = false;
  std::string termination_reason;
  double termination_time = 0.0;
  std::vector<double> t;
  /// [j][i] = t_i^{j/2} |D^j u(t_i)|_inf / A.
  std::vector<std::vector<double>> ratios;
  /// max over t > 0 of ratios[j].
  std::vector<double> k;
  /// max over the window of V / (C A).
  double v_ratio = 0.0;
  /// Largest relative gap between the heat control run and semigroup_ratios.
  double heat_control_error = 0.0;
};

struct TheoremBounds {
  TheoremBoundsConfig config;
  double c0 = 0.0;
  /// Sorted by (seed, amplitude).
  std::vector<CollapseRun> runs;
  /// [j][a]: max over seeds for amplitude a.
  std::vector<std::vector<double>> per_amplitude;
  std::vector<double> k;
  std::vector<double> median;
  /// [j]: max over amplitudes of max(K/median, median/K).
  std::vector<double> spread;
  int early_terminations = 0;
  double v_ratio = 0.0;
  double heat_control_error = 0.0;
};

TheoremBounds verify_theorem_bounds(const TheoremBoundsConfig& cfg);

/// Columns amplitude, seed, t, scaled_t (= t A^2), k0..kJ.
void write_collapse_csv(std::ostream& os, const TheoremBounds& result);

// ---------------------------------------------------------------------------
// Scaling symmetry u_lambda(x, t) = lambda u(lambda x, lambda^2 t)

struct ScalingCheckConfig {
  /// Must be a positive integer.
  double lambda = 2.0;
  int j_max = 2;
  /// Base run; dt defaults as in the solver. The lambda run uses lambda M
  /// modes, dt / lambda^2 and the same step count.
  SolverConfig base;
  bool pressure = true;

  void validate() const;
};

struct ScalingCheck {
  int lambda = 1;
  /// Base-run times of the matched samples.
  std::vector<double> t;
  /// [j][i] = | |D^j u_lambda| - lambda^{j+1} |D^j u| | / (lambda^{j+1} |D^j u|).
  std::vector<std::vector<double>> mismatch;
  std::vector<double> max_mismatch;
  /// Base-run times where pressures were compared.
  std::vector<double> pressure_t;
  /// max |p_lambda - lambda^2 p(lambda x)| / max |lambda^2 p|.
  double pressure_mismatch = 0.0;
};

/// Throws std::invalid_argument for non-integer or non-positive lambda.
ScalingCheck scaling_check(const SpectralVector& f, const ScalingCheckConfig& cfg);

// ---------------------------------------------------------------------------
// Control of the future by the past

struct FutureControl {
  int j = 0;
  /// Diagnostics time used for t1 (the last one not after the request).
  double t1 = 0.0;
  double tau = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  /// max |D^j u|_inf over [window_start, window_end].
  double left = 0.0;
  /// max |u|_inf^{j+1} over [0, t1].
  double right = 0.0;
  double ratio = 0.0;
};

/// tau = c0 / |u(t1)|^2 and window_start = c0 / (2 |f|^2). Throws
/// std::invalid_argument if t1 < window_start, j exceeds the diagnostics, or
/// the trajectory ends before t1 + tau.
FutureControl future_control_check(const Trajectory& traj, int j, double t1, double c0);

// ---------------------------------------------------------------------------
// Quadrature and kernel checks

struct BetaIntegralCheck {
  double t = 0.0;
  int nodes = 0;
  double value = 0.0;
  /// |value - pi|.
  double error = 0.0;
};

/// int_0^t (t-s)^{-1/2} s^{-1/2} ds by Gauss-Jacobi; the exact value is pi.
BetaIntegralCheck verify_beta_integral(double t, int nodes);

struct KernelDualityConfig {
  int x_points = 20;
  int t_points = 20;
  double t_min = 0.05;
  double t_max = 5.0;
  std::vector<int> dims{1, 2, 3};
  /// Truncation radii are chosen so each tail is below this fraction of theta.
  double tail_tolerance = 1e-13;

  void validate() const;
};

struct KernelDuality {
  /// [n-index]: max over the grid of |spectral - poisson| / poisson.
  std::vector<double> max_relative;
  double worst = 0.0;
  double worst_x = 0.0;
  double worst_t = 0.0;
  int worst_dim = 0;
  int evaluations = 0;
};

/// x runs over [0, pi] (point x_d = x (1 - 0.3 d) on axis d), t geometric.
KernelDuality kernel_duality(const KernelDualityConfig& cfg);

// ---------------------------------------------------------------------------
// Report

struct Verdict {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  /// "<=", ">=", "<", "==", "finite".
  std::string comparison;
  /// Key under EstimateReport::traces holding the data behind the verdict.
  std::string evidence;
};

struct EstimateReport {
  static constexpr int schema_version = 1;
  std::string experiment;
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  nlohmann::json constants = nlohmann::json::object();
  nlohmann::json traces = nlohmann::json::object();
  std::vector<Verdict> verdicts;
  /// Empty unless the caller stamps it; the only field allowed to differ between reruns.
  std::string timestamp;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Verdict for measured `comparison` threshold. NaN never passes.
Verdict make_verdict(std::string name, double measured, std::string comparison, double threshold,
                     std::string evidence);

/// 16 hex digits of FNV-1a over `text`.
std::string fnv1a_hex(const std::string& text);

void add_to_report(EstimateReport& report, const SemigroupConstants& r, double slack = 1e-12,
                   double stability = 0.05);
void add_to_report(EstimateReport& report, const ForcingBound& r);
void add_to_report(EstimateReport& report, const TheoremBounds& r);
void add_to_report(EstimateReport& report, const ScalingCheck& r, double tolerance = 1e-6);
/// Passes iff the ratio is finite.
void add_to_report(EstimateReport& report, const FutureControl& r);
void add_to_report(EstimateReport& report, const BetaIntegralCheck& r, double tolerance = 1e-8);
void add_to_report(EstimateReport& report, const KernelDuality& r, double tolerance = 1e-10);

}  // namespace torusns
