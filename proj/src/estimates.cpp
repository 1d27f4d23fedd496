#include "torusns/estimates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "torusns/fft.hpp"
#include "torusns/heat_kernel.hpp"
#include "torusns/initial_data.hpp"
#include "torusns/kernels.hpp"
#include "torusns/operators.hpp"
#include "torusns/quadrature.hpp"
#include "torusns/spectral.hpp"

namespace torusns {
namespace {

double norm_at(const Diagnostics& d, int j) { return j == 0 ? d.sup_u : d.dj_sup[static_cast<std::size_t>(j - 1)]; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double relative_gap(double a, double b) {
  double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

void check_t_grid(const std::vector<double>& t_grid, const char* who) {
  if (t_grid.empty()) throw std::invalid_argument(std::string(who) + ": empty t grid");
  for (double t : t_grid) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument(std::string(who) + ": t grid must lie in (0, inf)");
  }
}

nlohmann::json to_json(const std::vector<std::vector<double>>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows) out.push_back(r);
  return out;
}

}  // namespace

std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) throw std::invalid_argument("geometric_grid: need 0 < lo <= hi");
  if (count < 1) throw std::invalid_argument("geometric_grid: count must be >= 1");
  if (count == 1) {
    if (lo != hi) throw std::invalid_argument("geometric_grid: a single point needs lo == hi");
    return {lo};
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  const double ratio = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<double>> semigroup_ratios(const SpectralVector& f, int j_max,
                                                  const std::vector<double>& t_grid, bool project) {
  if (j_max < 0) throw std::invalid_argument("semigroup_ratios: j_max must be >= 0");
  check_t_grid(t_grid, "semigroup_ratios");
  const double fs = sup_norm(f);
  if (!(fs > 0.0)) throw std::invalid_argument("semigroup_ratios: f must be nonzero");
  const SpectralVector base = project ? leray_project(f) : f;
  std::vector<std::vector<double>> out(static_cast<std::size_t>(j_max + 1), std::vector<double>(t_grid.size()));
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    auto norms = dj_sup_norms(apply_heat_semigroup(base, t), j_max);
    for (int j = 0; j <= j_max; ++j) {
      out[static_cast<std::size_t>(j)][i] = std::pow(t, 0.5 * j) * norms[static_cast<std::size_t>(j)] / fs;
    }
  }
  return out;
}

void TrialFamily::validate() const {
  if (dim < 2 || dim > 3) throw std::invalid_argument("trial family: dim must be 2 or 3");
  if (modes < 4 || modes % 2) throw std::invalid_argument("trial family: modes must be even and >= 4");
  if (max_wavenumber < 1 || 2 * max_wavenumber >= modes) {
    throw std::invalid_argument("trial family: max_wavenumber must satisfy 1 <= k < modes/2");
  }
}

SpectralVector TrialFamily::field(std::size_t trial) const {
  auto g = TorusGrid::make(dim, modes);
  return normalize_sup(random_modes(g, base_seed + trial, max_wavenumber), 1.0);
}

double SemigroupConstants::doubling_change() const {
  double worst = 0.0;
  for (int j = 1; j <= j_max; ++j) {
    const auto i = static_cast<std::size_t>(j);
    worst = std::max(worst, std::abs(plain[i] / plain_half[i] - 1.0));
    worst = std::max(worst, std::abs(projected[i] / projected_half[i] - 1.0));
  }
  return worst;
}

SemigroupConstants measure_semigroup_constants(const TrialFamily& family, int j_max, int trial_count,
                                               const std::vector<double>& t_grid) {
  family.validate();
  if (j_max < 0) throw std::invalid_argument("measure_semigroup_constants: j_max must be >= 0");
  if (trial_count < 2) throw std::invalid_argument("measure_semigroup_constants: trial_count must be >= 2");
  check_t_grid(t_grid, "measure_semigroup_constants");

  const auto n = static_cast<std::size_t>(trial_count);
  std::vector<std::vector<std::vector<double>>> plain(n), proj(n);
  kernels::for_each_trial(n, [&](std::size_t i) {
    auto f = family.field(i);
    plain[i] = semigroup_ratios(f, j_max, t_grid, false);
    proj[i] = semigroup_ratios(f, j_max, t_grid, true);
  });

  SemigroupConstants out;
  out.j_max = j_max;
  out.trials = trial_count;
  out.t_grid = t_grid;
  const auto J = static_cast<std::size_t>(j_max + 1);
  out.plain.assign(J, 0.0);
  out.projected.assign(J, 0.0);
  out.plain_half.assign(J, 0.0);
  out.projected_half.assign(J, 0.0);
  out.plain_curve.assign(J, std::vector<double>(t_grid.size(), 0.0));
  out.projected_curve.assign(J, std::vector<double>(t_grid.size(), 0.0));
  out.max_principle_excess = -std::numeric_limits<double>::infinity();
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < n; ++i) {
    out.seeds.push_back(family.base_seed + i);
    for (std::size_t j = 0; j < J; ++j) {
      for (std::size_t q = 0; q < t_grid.size(); ++q) {
        const double a = kernels::serial::nan_as_inf(plain[i][j][q]);
        const double b = kernels::serial::nan_as_inf(proj[i][j][q]);
        out.plain_curve[j][q] = std::max(out.plain_curve[j][q], a);
        out.projected_curve[j][q] = std::max(out.projected_curve[j][q], b);
        out.plain[j] = std::max(out.plain[j], a);
        out.projected[j] = std::max(out.projected[j], b);
        if (i < half) {
          out.plain_half[j] = std::max(out.plain_half[j], a);
          out.projected_half[j] = std::max(out.projected_half[j], b);
        }
        if (j == 0) out.max_principle_excess = std::max(out.max_principle_excess, a - 1.0);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

SpectralVector forced_heat_solution(const SpectralVector& g, int axis, double t) {
  const auto& grid = g.grid();
  if (axis < 0 || axis >= grid.dim()) throw std::invalid_argument("forced_heat_solution: axis out of range");
  if (!(t >= 0.0)) throw std::invalid_argument("forced_heat_solution: t must be >= 0");
  SpectralVector u = leray_project(g);
  kernels::for_each_mode(grid, [&](std::size_t idx, const Wavevector& k) {
    const double kk = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1] +
                      static_cast<double>(k[2]) * k[2];
    const int ka = odd_symbol_wavevector(grid, k)[axis];
    const Complex factor = kk == 0.0 || ka == 0 ? Complex{} : Complex(0.0, ka * (-std::expm1(-kk * t) / kk));
    for (auto& c : u) c[idx] *= factor;
  });
  return u;
}

std::vector<double> forcing_ratios(const SpectralVector& g, int axis, const std::vector<double>& t_grid) {
  check_t_grid(t_grid, "forcing_ratios");
  std::vector<double> out(t_grid.size(), 0.0);
  const double gs = sup_norm(g);
  if (gs == 0.0) return out;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    out[i] = sup_norm(forced_heat_solution(g, axis, t_grid[i])) / (std::sqrt(t_grid[i]) * gs);
  }
  return out;
}

void ForcingFamily::validate() const {
  if (modes < 4 || modes % 2) throw std::invalid_argument("forcing family: modes must be even and >= 4");
  if (max_wavenumber < 1 || 4 * max_wavenumber >= modes) {
    throw std::invalid_argument("forcing family: need 1 <= max_wavenumber < modes/4 so g is alias-free");
  }
  if (t_points < 2) throw std::invalid_argument("forcing family: t_points must be >= 2");
  if (!(start_fraction > 0.0 && start_fraction < 1.0)) {
    throw std::invalid_argument("forcing family: start_fraction must lie in (0, 1)");
  }
}

namespace {

// g_term(w) evaluated pointwise and transformed back; exact because the
// product band stays below Nyquist.
SpectralVector evaluate_forcing(const GSpec& spec, int term, const SpectralVector& w) {
  const auto& grid = w.grid();
  const int n = spec.dim();
  auto phys = inverse_transform(w);
  std::vector<RealField> comps(static_cast<std::size_t>(n), RealField(grid));
  kernels::for_each_index(grid.size(), [&](std::size_t p) {
    std::array<double, kMaxDim> u{0.0, 0.0, 0.0};
    for (int c = 0; c < n; ++c) u[static_cast<std::size_t>(c)] = phys[c][p];
    auto gv = spec.evaluate(term, u);
    for (int c = 0; c < n; ++c) comps[static_cast<std::size_t>(c)][p] = gv[static_cast<std::size_t>(c)];
  });
  return forward_transform(RealVector(std::move(comps)));
}

}  // namespace

ForcingBound verify_forcing_bound(const GSpec& spec, double end_time, int trials, const ForcingFamily& family) {
  family.validate();
  if (!(end_time > 0.0) || !std::isfinite(end_time)) throw std::invalid_argument("verify_forcing_bound: T must be > 0");
  if (trials < 1) throw std::invalid_argument("verify_forcing_bound: trials must be >= 1");
  ForcingBound out;
  out.end_time = end_time;
  out.trials = trials;
  out.t_grid = geometric_grid(end_time * family.start_fraction, end_time, family.t_points);
  const auto grid = TorusGrid::make(spec.dim(), family.modes);
  const auto n = static_cast<std::size_t>(trials);
  std::vector<std::vector<double>> per_trial(n);
  kernels::for_each_trial(n, [&](std::size_t i) {
    auto w = random_bandlimited(grid, family.base_seed + i, family.max_wavenumber, 1.0);
    std::vector<double> best(out.t_grid.size(), 0.0);
    for (int term = 0; term < static_cast<int>(spec.terms().size()); ++term) {
      auto g = evaluate_forcing(spec, term, w);
      auto r = forcing_ratios(g, spec.terms()[static_cast<std::size_t>(term)].axis, out.t_grid);
      for (std::size_t q = 0; q < r.size(); ++q) best[q] = std::max(best[q], kernels::serial::nan_as_inf(r[q]));
    }
    per_trial[i] = std::move(best);
  });
  out.curve.assign(out.t_grid.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.seeds.push_back(family.base_seed + i);
    for (std::size_t q = 0; q < out.curve.size(); ++q) out.curve[q] = std::max(out.curve[q], per_trial[i][q]);
  }
  out.constant = *std::max_element(out.curve.begin(), out.curve.end());
  out.bounded = std::isfinite(out.constant);
  return out;
}

// ---------------------------------------------------------------------------

double solution_constant(const SemigroupConstants& semigroup, const ForcingBound& forcing) {
  if (semigroup.j_max < 1) throw std::invalid_argument("solution_constant: semigroup constants need j >= 1");
  return std::max({1.0, forcing.constant, semigroup.plain[1], semigroup.projected[1]});
}

double solution_window(double C) {
  if (!(C > 0.0)) throw std::invalid_argument("solution_window: C must be > 0");
  return 1.0 / (16.0 * C * C * C * C);
}

double g_system_window(double C, double c_g) {
  if (!(C > 0.0) || !(c_g > 0.0)) throw std::invalid_argument("g_system_window: C and C_g must be > 0");
  return 1.0 / (16.0 * C * C * c_g * c_g);
}

std::vector<VSample> compute_V(const Trajectory& traj) {
  if (traj.j_max < 1) throw std::invalid_argument("compute_V: trajectory has no first-derivative diagnostics");
  std::vector<VSample> out;
  out.reserve(traj.diagnostics.size());
  for (const auto& d : traj.diagnostics) out.push_back({d.t, d.sup_u + std::sqrt(d.t) * d.dj_sup[0]});
  return out;
}

// ---------------------------------------------------------------------------

CollapseFamily parse_collapse_family(const std::string& name) {
  if (name == "scaling_orbit") return CollapseFamily::scaling_orbit;
  if (name == "fixed_profile") return CollapseFamily::fixed_profile;
  throw std::invalid_argument("unknown collapse family: " + name);
}

std::string to_string(CollapseFamily family) {
  return family == CollapseFamily::scaling_orbit ? "scaling_orbit" : "fixed_profile";
}

namespace {

int integer_ratio(double a, double base) {
  const double r = a / base;
  const double k = std::round(r);
  if (k < 1.0 || std::abs(r - k) > 1e-12 * k) return 0;
  return static_cast<int>(k);
}

}  // namespace

void TheoremBoundsConfig::validate() const {
  auto bad = [](const std::string& what) { throw std::invalid_argument("theorem bounds: " + what); };
  if (amplitudes.empty()) bad("amplitudes must be non-empty");
  for (double a : amplitudes) {
    if (!(a > 0.0) || !std::isfinite(a)) bad("amplitudes must be > 0");
  }
  if (seeds.empty()) bad("seeds must be non-empty");
  if (j_max < 1 || j_max > 8) bad("j_max must be in 1..8");
  if (dim < 2 || dim > 3) bad("dim must be 2 or 3");
  if (modes < 8 || modes % 2) bad("modes must be even and >= 8");
  if (max_wavenumber < 1) bad("max_wavenumber must be >= 1");
  if (!(C > 0.0) || !std::isfinite(C)) bad("C must be > 0");
  if (steps < 1) bad("steps must be >= 1");
  if (diagnostics_every < 1) bad("diagnostics_every must be >= 1");
  if (!(collapse_factor >= 1.0)) bad("collapse_factor must be >= 1");
  if (!(k0_bound > 0.0)) bad("k0_bound must be > 0");
  int widest = max_wavenumber;
  if (family == CollapseFamily::scaling_orbit) {
    const double lo = *std::min_element(amplitudes.begin(), amplitudes.end());
    for (double a : amplitudes) {
      int lambda = integer_ratio(a, lo);
      if (lambda == 0) bad("scaling_orbit needs amplitudes that are integer multiples of the smallest");
      widest = std::max(widest, lambda * max_wavenumber);
    }
  }
  if (3 * widest > modes) bad("initial band " + std::to_string(widest) + " exceeds the dealiased band of modes");
}

double TheoremBoundsConfig::c0() const { return solution_window(C); }

TheoremBounds verify_theorem_bounds(const TheoremBoundsConfig& cfg) {
  cfg.validate();
  TheoremBounds out;
  out.config = cfg;
  out.c0 = cfg.c0();
  const auto grid = TorusGrid::make(cfg.dim, cfg.modes);

  auto amps = cfg.amplitudes;
  std::sort(amps.begin(), amps.end());
  amps.erase(std::unique(amps.begin(), amps.end()), amps.end());
  auto seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  out.config.amplitudes = amps;
  out.config.seeds = seeds;

  struct Job {
    std::uint64_t seed;
    std::size_t amp_index;
  };
  std::vector<Job> jobs;
  for (auto s : seeds) {
    for (std::size_t a = 0; a < amps.size(); ++a) jobs.push_back({s, a});
  }
  const auto J = static_cast<std::size_t>(cfg.j_max + 1);
  out.runs.resize(jobs.size());

  kernels::for_each_trial(jobs.size(), [&](std::size_t r) {
    const double A = amps[jobs[r].amp_index];
    SpectralVector f;
    if (cfg.family == CollapseFamily::scaling_orbit) {
      auto base = random_bandlimited(grid, jobs[r].seed, cfg.max_wavenumber, 1.0);
      f = normalize_sup(dilate(base, integer_ratio(A, amps.front()), 1.0, grid), A);
    } else {
      f = random_bandlimited(grid, jobs[r].seed, cfg.max_wavenumber, A);
    }
    const double fs = sup_norm(f);
    CollapseRun run;
    run.amplitude = A;
    run.seed = jobs[r].seed;
    run.end_time = out.c0 / (A * A);

    SolverConfig sc;
    sc.dim = cfg.dim;
    sc.modes = cfg.modes;
    sc.end_time = run.end_time;
    sc.dt = run.end_time / cfg.steps;
    sc.j_max = cfg.j_max;
    sc.diagnostics_every = cfg.diagnostics_every;
    auto traj = simulate(f, sc);
    run.terminated_early = traj.terminated_early;
    run.termination_reason = traj.termination_reason;
    run.termination_time = traj.termination_time;

    run.ratios.assign(J, {});
    run.k.assign(J, 0.0);
    for (const auto& d : traj.diagnostics) {
      run.t.push_back(d.t);
      for (std::size_t j = 0; j < J; ++j) {
        double v = std::pow(d.t, 0.5 * static_cast<double>(j)) * norm_at(d, static_cast<int>(j)) / fs;
        run.ratios[j].push_back(v);
        if (d.t > 0.0) run.k[j] = std::max(run.k[j], kernels::serial::nan_as_inf(v));
      }
    }
    for (const auto& v : compute_V(traj)) {
      run.v_ratio = std::max(run.v_ratio, kernels::serial::nan_as_inf(v.v / (cfg.C * fs)));
    }

    if (cfg.heat_control) {
      auto heat = integrate(f, Dynamics::heat(), sc);
      std::vector<double> times;
      for (const auto& d : heat.diagnostics) {
        if (d.t > 0.0) times.push_back(d.t);
      }
      auto direct = semigroup_ratios(f, cfg.j_max, times, false);
      std::size_t q = 0;
      for (const auto& d : heat.diagnostics) {
        if (!(d.t > 0.0)) continue;
        for (std::size_t j = 0; j < J; ++j) {
          double v = std::pow(d.t, 0.5 * static_cast<double>(j)) * norm_at(d, static_cast<int>(j)) / fs;
          run.heat_control_error = std::max(run.heat_control_error, relative_gap(v, direct[j][q]));
        }
        ++q;
      }
    }
    out.runs[r] = std::move(run);
  });

  out.per_amplitude.assign(J, std::vector<double>(amps.size(), 0.0));
  out.k.assign(J, 0.0);
  for (std::size_t r = 0; r < jobs.size(); ++r) {
    const auto& run = out.runs[r];
    if (run.terminated_early) ++out.early_terminations;
    out.v_ratio = std::max(out.v_ratio, run.v_ratio);
    out.heat_control_error = std::max(out.heat_control_error, run.heat_control_error);
    for (std::size_t j = 0; j < J; ++j) {
      auto& slot = out.per_amplitude[j][jobs[r].amp_index];
      slot = std::max(slot, run.k[j]);
      out.k[j] = std::max(out.k[j], run.k[j]);
    }
  }
  out.median.assign(J, 0.0);
  out.spread.assign(J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    out.median[j] = median(out.per_amplitude[j]);
    for (double v : out.per_amplitude[j]) {
      double s = out.median[j] > 0.0 && v > 0.0 ? std::max(v / out.median[j], out.median[j] / v)
                                                  : std::numeric_limits<double>::infinity();
      out.spread[j] = std::max(out.spread[j], s);
    }
  }
  return out;
}

void write_collapse_csv(std::ostream& os, const TheoremBounds& result) {
  const int J = result.config.j_max;
  os << "amplitude,seed,t,scaled_t";
  for (int j = 0; j <= J; ++j) os << ",k" << j;
  os << '\n';
  os.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& run : result.runs) {
    for (std::size_t i = 0; i < run.t.size(); ++i) {
      os << run.amplitude << ',' << run.seed << ',' << run.t[i] << ',' << run.t[i] * run.amplitude * run.amplitude;
      for (int j = 0; j <= J; ++j) os << ',' << run.ratios[static_cast<std::size_t>(j)][i];
      os << '\n';
    }
  }
}

// ---------------------------------------------------------------------------

void ScalingCheckConfig::validate() const {
  if (!(lambda >= 1.0) || std::round(lambda) != lambda || lambda > 16.0) {
    throw std::invalid_argument("scaling check: lambda must be a positive integer (got " + std::to_string(lambda) + ")");
  }
  if (j_max < 0) throw std::invalid_argument("scaling check: j_max must be >= 0");
  base.validate();
}

ScalingCheck scaling_check(const SpectralVector& f, const ScalingCheckConfig& cfg) {
  cfg.validate();
  const int lambda = static_cast<int>(cfg.lambda);
  const double l2 = static_cast<double>(lambda) * lambda;
  SolverConfig base = cfg.base;
  base.j_max = std::max(cfg.j_max, 0);
  if (!base.dt) base.dt = default_time_step(f, base.dealias);
  const long steps = std::max(1L, static_cast<long>(std::ceil(base.end_time / *base.dt - 1e-9)));
  base.dt = base.end_time / static_cast<double>(steps);

  SolverConfig fine = base;
  fine.modes = base.modes * lambda;
  fine.dt = *base.dt / l2;
  fine.end_time = base.end_time / l2;
  if (base.blowup_threshold) fine.blowup_threshold = *base.blowup_threshold * lambda;

  auto f_lambda = dilate(f, lambda, static_cast<double>(lambda), fine.grid());
  auto coarse_run = simulate(f, base);
  auto fine_run = simulate(f_lambda, fine);
  if (coarse_run.diagnostics.size() != fine_run.diagnostics.size() ||
      coarse_run.samples.size() != fine_run.samples.size()) {
    throw std::runtime_error("scaling_check: runs produced different sample counts");
  }

  ScalingCheck out;
  out.lambda = lambda;
  const auto J = static_cast<std::size_t>(cfg.j_max + 1);
  out.mismatch.assign(J, {});
  out.max_mismatch.assign(J, 0.0);
  for (std::size_t i = 0; i < coarse_run.diagnostics.size(); ++i) {
    const auto& a = coarse_run.diagnostics[i];
    const auto& b = fine_run.diagnostics[i];
    out.t.push_back(a.t);
    for (std::size_t j = 0; j < J; ++j) {
      const double expected = std::pow(static_cast<double>(lambda), static_cast<double>(j + 1)) * norm_at(a, static_cast<int>(j));
      const double got = norm_at(b, static_cast<int>(j));
      const double m = expected == 0.0 ? std::abs(got) : std::abs(got - expected) / expected;
      out.mismatch[j].push_back(m);
      out.max_mismatch[j] = std::max(out.max_mismatch[j], kernels::serial::nan_as_inf(m));
    }
  }

  if (cfg.pressure) {
    const auto& cg = coarse_run.samples.front().u.grid();
    const auto& fg = fine_run.samples.front().u.grid();
    for (std::size_t s = 0; s < coarse_run.samples.size(); ++s) {
      auto p = pressure_from_velocity(coarse_run.samples[s].u).pressure;
      auto pl = pressure_from_velocity(fine_run.samples[s].u).pressure;
      double scale = 0.0;
      double diff = 0.0;
      const int M = cg.modes();
      for (std::size_t idx = 0; idx < fg.size(); ++idx) {
        auto a = fg.unflatten(idx);
        std::array<int, kMaxDim> b{a[0] % M, a[1] % M, a[2] % M};
        const double expected = l2 * p[cg.flatten(b)];
        scale = std::max(scale, std::abs(expected));
        diff = std::max(diff, std::abs(pl[idx] - expected));
      }
      out.pressure_t.push_back(coarse_run.samples[s].t);
      const double m = scale == 0.0 ? diff : diff / scale;
      out.pressure_mismatch = std::max(out.pressure_mismatch, kernels::serial::nan_as_inf(m));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

FutureControl future_control_check(const Trajectory& traj, int j, double t1, double c0) {
  const auto& d = traj.diagnostics;
  if (d.empty() || d.front().t != 0.0) throw std::invalid_argument("future_control_check: diagnostics must start at t = 0");
  if (j < 0 || j > traj.j_max) throw std::invalid_argument("future_control_check: j exceeds the recorded diagnostics");
  if (!(c0 > 0.0)) throw std::invalid_argument("future_control_check: c0 must be > 0");
  const double fs = d.front().sup_u;
  if (!(fs > 0.0)) throw std::invalid_argument("future_control_check: zero initial data");

  FutureControl out;
  out.j = j;
  out.window_start = c0 / (2.0 * fs * fs);
  if (t1 < out.window_start) {
    throw std::invalid_argument("future_control_check: t1 = " + std::to_string(t1) + " is before c0/(2|f|^2) = " +
                                std::to_string(out.window_start));
  }
  std::size_t i1 = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i].t <= t1 * (1.0 + 1e-12)) i1 = i;
  }
  out.t1 = d[i1].t;
  if (out.t1 < out.window_start) {
    throw std::invalid_argument("future_control_check: no diagnostics sample in [c0/(2|f|^2), t1]");
  }
  const double s1 = d[i1].sup_u;
  out.tau = c0 / (s1 * s1);
  out.window_end = out.t1 + out.tau;
  if (traj.terminated_early || d.back().t < out.window_end * (1.0 - 1e-12)) {
    throw std::invalid_argument("future_control_check: trajectory ends at t = " + std::to_string(d.back().t) +
                                " before t1 + tau = " + std::to_string(out.window_end));
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i <= i1) out.right = std::max(out.right, std::pow(d[i].sup_u, j + 1));
    if (d[i].t >= out.window_start * (1.0 - 1e-12) && d[i].t <= out.window_end * (1.0 + 1e-12)) {
      out.left = std::max(out.left, kernels::serial::nan_as_inf(norm_at(d[i], j)));
    }
  }
  out.ratio = out.left / out.right;
  return out;
}

// ---------------------------------------------------------------------------

BetaIntegralCheck verify_beta_integral(double t, int nodes) {
  BetaIntegralCheck out;
  out.t = t;
  out.nodes = nodes;
  out.value = singular_integral([](double) { return 1.0; }, t, -0.5, -0.5, nodes);
  out.error = std::abs(out.value - std::numbers::pi);
  return out;
}

void KernelDualityConfig::validate() const {
  if (x_points < 1 || t_points < 2) throw std::invalid_argument("kernel duality: need x_points >= 1, t_points >= 2");
  if (!(t_min > 0.0) || !(t_max > t_min)) throw std::invalid_argument("kernel duality: need 0 < t_min < t_max");
  if (dims.empty()) throw std::invalid_argument("kernel duality: dims must be non-empty");
  for (int n : dims) {
    if (n < 1 || n > 3) throw std::invalid_argument("kernel duality: dims must be in 1..3");
  }
  if (!(tail_tolerance > 0.0)) throw std::invalid_argument("kernel duality: tail_tolerance must be > 0");
}

KernelDuality kernel_duality(const KernelDualityConfig& cfg) {
  cfg.validate();
  const auto ts = geometric_grid(cfg.t_min, cfg.t_max, cfg.t_points);
  KernelDuality out;
  out.max_relative.assign(cfg.dims.size(), 0.0);
  for (std::size_t di = 0; di < cfg.dims.size(); ++di) {
    const int n = cfg.dims[di];
    for (int ix = 0; ix < cfg.x_points; ++ix) {
      const double x = cfg.x_points == 1 ? 0.0 : std::numbers::pi * ix / (cfg.x_points - 1);
      std::vector<double> pt(static_cast<std::size_t>(n));
      for (int d = 0; d < n; ++d) pt[static_cast<std::size_t>(d)] = x * (1.0 - 0.3 * d);
      for (double t : ts) {
        KernelEvalConfig sc;
        sc.representation = KernelRepresentation::spectral;
        sc.truncation_radius = spectral_radius_for(pt, t, cfg.tail_tolerance, true);
        KernelEvalConfig pc;
        pc.representation = KernelRepresentation::poisson;
        pc.truncation_radius = poisson_radius_for(pt, t, cfg.tail_tolerance, true);
        const double s = heat_kernel_spectral(pt, t, sc).value;
        const double p = heat_kernel_poisson(pt, t, pc).value;
        const double rel = kernels::serial::nan_as_inf(std::abs(s - p) / std::abs(p));
        ++out.evaluations;
        if (rel > out.max_relative[di]) out.max_relative[di] = rel;
        if (rel > out.worst || out.evaluations == 1) {
          out.worst = rel;
          out.worst_x = x;
          out.worst_t = t;
          out.worst_dim = n;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Verdict make_verdict(std::string name, double measured, std::string comparison, double threshold,
                     std::string evidence) {
  Verdict v;
  v.name = std::move(name);
  v.measured = measured;
  v.threshold = threshold;
  v.evidence = std::move(evidence);
  if (comparison == "<=") {
    v.passed = measured <= threshold;
  } else if (comparison == "<") {
    v.passed = measured < threshold;
  } else if (comparison == ">=") {
    v.passed = measured >= threshold;
  } else if (comparison == "==") {
    v.passed = measured == threshold;
  } else if (comparison == "finite") {
    v.passed = std::isfinite(measured);
  } else {
    throw std::invalid_argument("make_verdict: unknown comparison " + comparison);
  }
  v.comparison = std::move(comparison);
  return v;
}

bool EstimateReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

nlohmann::json EstimateReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = schema_version;
  j["experiment"] = experiment;
  j["config_hash"] = config_hash;
  j["seeds"] = seeds;
  j["constants"] = constants;
  j["traces"] = traces;
  auto vs = nlohmann::json::array();
  for (const auto& v : verdicts) {
    vs.push_back({{"name", v.name},
                  {"passed", v.passed},
                  {"measured", v.measured},
                  {"threshold", v.threshold},
                  {"comparison", v.comparison},
                  {"evidence", v.evidence}});
  }
  j["verdicts"] = vs;
  j["passed"] = passed();
  j["timestamp"] = timestamp;
  return j;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

void add_to_report(EstimateReport& report, const SemigroupConstants& r, double slack, double stability) {
  report.traces["semigroup"] = {{"t_grid", r.t_grid},
                                {"trials", r.trials},
                                {"plain", r.plain},
                                {"projected", r.projected},
                                {"plain_half", r.plain_half},
                                {"projected_half", r.projected_half},
                                {"plain_curve", to_json(r.plain_curve)},
                                {"projected_curve", to_json(r.projected_curve)},
                                {"max_principle_excess", r.max_principle_excess}};
  report.constants["C_j"] = r.plain;
  report.constants["C_j_projected"] = r.projected;
  report.verdicts.push_back(make_verdict("maximum_principle", r.max_principle_excess, "<=", slack, "semigroup"));
  double largest = 0.0;
  for (std::size_t j = 0; j < r.plain.size(); ++j) largest = std::max({largest, r.plain[j], r.projected[j]});
  report.verdicts.push_back(make_verdict("semigroup_constants_finite", largest, "finite", 0.0, "semigroup"));
  report.verdicts.push_back(make_verdict("semigroup_constants_stable", r.doubling_change(), "<=", stability, "semigroup"));
}

void add_to_report(EstimateReport& report, const ForcingBound& r) {
  report.traces["forcing_bound"] = {
      {"t_grid", r.t_grid}, {"curve", r.curve}, {"trials", r.trials}, {"end_time", r.end_time}};
  report.constants["C_forcing"] = r.constant;
  report.verdicts.push_back(make_verdict("forcing_bound_finite", r.constant, "finite", 0.0, "forcing_bound"));
}

void add_to_report(EstimateReport& report, const TheoremBounds& r) {
  auto runs = nlohmann::json::array();
  for (const auto& run : r.runs) {
    runs.push_back({{"amplitude", run.amplitude},
                    {"seed", run.seed},
                    {"end_time", run.end_time},
                    {"terminated_early", run.terminated_early},
                    {"termination_reason", run.termination_reason},
                    {"K_j", run.k},
                    {"v_ratio", run.v_ratio},
                    {"heat_control_error", run.heat_control_error}});
  }
  report.traces["theorem_bounds"] = {{"family", to_string(r.config.family)},
                                     {"amplitudes", r.config.amplitudes},
                                     {"runs", runs},
                                     {"per_amplitude_K_j", to_json(r.per_amplitude)},
                                     {"median_K_j", r.median},
                                     {"spread", r.spread}};
  report.constants["C"] = r.config.C;
  report.constants["c0"] = r.c0;
  report.constants["K_j"] = r.k;
  report.verdicts.push_back(
      make_verdict("no_early_termination", static_cast<double>(r.early_terminations), "==", 0.0, "theorem_bounds"));
  report.verdicts.push_back(make_verdict("K0_bound", r.k.empty() ? 0.0 : r.k[0], "<=", r.config.k0_bound, "theorem_bounds"));
  double spread = 0.0;
  for (double s : r.spread) spread = std::max(spread, kernels::serial::nan_as_inf(s));
  report.verdicts.push_back(make_verdict("amplitude_collapse", spread, "<=", r.config.collapse_factor, "theorem_bounds"));
  report.verdicts.push_back(make_verdict("V_window_bound", r.v_ratio, "<", 2.0, "theorem_bounds"));
  if (r.config.heat_control) {
    report.verdicts.push_back(make_verdict("heat_control", r.heat_control_error, "<=", 0.01, "theorem_bounds"));
  }
}

void add_to_report(EstimateReport& report, const ScalingCheck& r, double tolerance) {
  report.traces["scaling"] = {{"lambda", r.lambda},
                              {"t", r.t},
                              {"mismatch", to_json(r.mismatch)},
                              {"pressure_t", r.pressure_t},
                              {"pressure_mismatch", r.pressure_mismatch}};
  double worst = 0.0;
  for (double m : r.max_mismatch) worst = std::max(worst, m);
  report.verdicts.push_back(make_verdict("scaling_derivative_norms", worst, "<=", tolerance, "scaling"));
  if (!r.pressure_t.empty()) {
    report.verdicts.push_back(make_verdict("scaling_pressure", r.pressure_mismatch, "<=", tolerance, "scaling"));
  }
}

void add_to_report(EstimateReport& report, const FutureControl& r) {
  std::string key = "future_control_j" + std::to_string(r.j);
  report.traces[key] = {{"t1", r.t1},         {"tau", r.tau},     {"window_start", r.window_start},
                        {"window_end", r.window_end}, {"left", r.left}, {"right", r.right},
                        {"ratio", r.ratio}};
  report.verdicts.push_back(make_verdict(key, r.ratio, "finite", 0.0, key));
}

void add_to_report(EstimateReport& report, const BetaIntegralCheck& r, double tolerance) {
  report.traces["beta_integral"] = {{"t", r.t}, {"nodes", r.nodes}, {"value", r.value}, {"error", r.error}};
  report.verdicts.push_back(make_verdict("beta_integral", r.error, "<=", tolerance, "beta_integral"));
}

void add_to_report(EstimateReport& report, const KernelDuality& r, double tolerance) {
  report.traces["kernel_duality"] = {{"max_relative", r.max_relative},
                                     {"worst_x", r.worst_x},
                                     {"worst_t", r.worst_t},
                                     {"worst_dim", r.worst_dim},
                                     {"evaluations", r.evaluations}};
  report.verdicts.push_back(make_verdict("kernel_duality", r.worst, "<=", tolerance, "kernel_duality"));
}

}  // namespace torusns
