#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "torusns/estimates.hpp"
#include "torusns/initial_data.hpp"
#include "torusns/kernels.hpp"
#include "torusns/operators.hpp"
#include "torusns/quadrature.hpp"

using namespace torusns;

namespace {

// (0, sin x1, 0) on the given grid: divergence-free, |D^j|_inf = 1 for every j.
SpectralVector shear_mode(const TorusGrid& g) {
  return testing::sampled(g, {[](auto) { return 0.0; }, [](auto x) { return std::sin(x[0]); }});
}

SolverConfig run_config(int dim, int modes, double T, double dt, int j_max) {
  SolverConfig c;
  c.dim = dim;
  c.modes = modes;
  c.end_time = T;
  c.dt = dt;
  c.j_max = j_max;
  return c;
}

}  // namespace

TEST_CASE("geometric grid") {
  auto g = geometric_grid(1e-3, 10.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 1e-3);
  CHECK(g.back() == 10.0);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(g[i + 1] / g[i] == doctest::Approx(10.0).epsilon(1e-13));
  CHECK(geometric_grid(2.0, 2.0, 1) == std::vector<double>{2.0});
  CHECK_THROWS_AS(geometric_grid(0.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(geometric_grid(2.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(geometric_grid(1.0, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(geometric_grid(1.0, 2.0, 0), std::invalid_argument);
}

TEST_CASE("semigroup ratios of a single mode") {
  auto g = TorusGrid::make(3, 16);
  auto f = shear_mode(g);
  auto ts = geometric_grid(0.5 / 64.0, 0.5 * 64.0, 13);  // contains t = 0.5
  auto r = semigroup_ratios(f, 2, ts, false);
  double best = 0.0;
  for (double v : r[1]) best = std::max(best, v);
  // max_t t^{1/2} e^{-t} = (2e)^{-1/2}
  CHECK(best == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::e)).epsilon(1e-13));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(r[0][i] == doctest::Approx(std::exp(-ts[i])).epsilon(1e-13));
    CHECK(r[2][i] == doctest::Approx(ts[i] * std::exp(-ts[i])).epsilon(1e-13));
  }
  auto rp = semigroup_ratios(f, 2, ts, true);
  CHECK(rp == r);
  CHECK_THROWS_AS(semigroup_ratios(f, 1, {0.0}, false), std::invalid_argument);
  CHECK_THROWS_AS(semigroup_ratios(SpectralVector::zeros(g), 1, ts, false), std::invalid_argument);
}

TEST_CASE("semigroup constants: maximum principle, fold and execution modes") {
  TrialFamily fam;
  fam.modes = 16;
  fam.max_wavenumber = 2;
  auto ts = geometric_grid(1e-2, 4.0, 6);
  SemigroupConstants a, b;
  {
    kernels::ScopedExecution mode(kernels::Execution::serial);
    a = measure_semigroup_constants(fam, 3, 8, ts);
  }
  {
    kernels::ScopedExecution mode(kernels::Execution::parallel);
    b = measure_semigroup_constants(fam, 3, 8, ts);
  }
  CHECK(a.plain == b.plain);
  CHECK(a.projected == b.projected);
  CHECK(a.plain_curve == b.plain_curve);
  CHECK(a.max_principle_excess <= 1e-12);
  CHECK(a.plain[0] <= 1.0 + 1e-12);
  REQUIRE(a.seeds.size() == 8);
  CHECK(a.seeds.front() == fam.base_seed);
  for (int j = 0; j <= 3; ++j) {
    CHECK(std::isfinite(a.plain[j]));
    CHECK(a.plain_half[j] <= a.plain[j]);
    CHECK(a.projected_half[j] <= a.projected[j]);
    double curve_max = *std::max_element(a.plain_curve[j].begin(), a.plain_curve[j].end());
    CHECK(curve_max == a.plain[j]);
  }
  CHECK(a.doubling_change() >= 0.0);
  // The fold is over explicit per-trial results: the first trial alone bounds the half maxima from below.
  auto first = semigroup_ratios(fam.field(0), 3, ts, false);
  for (int j = 0; j <= 3; ++j) {
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(first[j][i] <= a.plain_half[j]);
  }
}

TEST_CASE("semigroup ratios are invariant under dilation") {
  auto g = TorusGrid::make(3, 16);
  auto fine = TorusGrid::make(3, 32);
  auto f = normalize_sup(random_modes(g, 7, 2), 1.0);
  auto f2 = dilate(f, 2, 2.0, fine);
  auto ts = geometric_grid(1e-2, 2.0, 5);
  std::vector<double> ts2;
  for (double t : ts) ts2.push_back(t / 4.0);
  auto a = semigroup_ratios(f, 3, ts, true);
  auto b = semigroup_ratios(f2, 3, ts2, true);
  for (int j = 0; j <= 3; ++j) {
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(a[j][i] - b[j][i]) <= 1e-12 * a[j][i]);
  }
}

TEST_CASE("forced heat solution matches a Duhamel quadrature") {
  auto g = TorusGrid::make(3, 8);
  auto forcing = random_modes(g, 3, 2);
  const double t = 0.5;
  for (int axis = 0; axis < 3; ++axis) {
    auto exact = forced_heat_solution(forcing, axis, t);
    auto src = spectral_derivative(leray_project(forcing), MultiIndex::unit(axis));
    auto rule = gauss_legendre(48, 0.0, t);
    auto sum = SpectralVector::zeros(g);
    for (std::size_t q = 0; q < rule.size(); ++q) sum.axpy(rule.weights[q], apply_heat_semigroup(src, t - rule.nodes[q]));
    CHECK(testing::coeff_diff(exact, sum) <= 1e-13);
  }
  CHECK_THROWS_AS(forced_heat_solution(forcing, 3, t), std::invalid_argument);
}

TEST_CASE("forcing ratios: zero forcing and small-t expansion") {
  auto g = TorusGrid::make(3, 16);
  auto ts = geometric_grid(1e-6, 1.0, 7);
  auto zero = forcing_ratios(SpectralVector::zeros(g), 0, ts);
  for (double v : zero) CHECK(v == 0.0);
  // g = (0, sin x1, 0): u = (1 - e^{-t}) (0, cos x1, 0), ratio (1 - e^{-t}) / t^{1/2}.
  auto r = forcing_ratios(shear_mode(g), 0, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(r[i] == doctest::Approx(-std::expm1(-ts[i]) / std::sqrt(ts[i])).epsilon(1e-13));
  // Small t: ratio ~ t^{1/2} |D_1 P g|_inf = t^{1/2}.
  CHECK(r[0] == doctest::Approx(std::sqrt(ts[0])).epsilon(1e-6));
  // D_2 annihilates g, so the response is identically zero.
  for (double v : forcing_ratios(shear_mode(g), 1, ts)) CHECK(v == 0.0);
}

TEST_CASE("forcing bound over random quadratic forcings") {
  ForcingFamily fam;
  fam.modes = 16;
  fam.t_points = 8;
  auto res = verify_forcing_bound(GSpec::navier_stokes(3), 10.0, 3, fam);
  CHECK(res.bounded);
  CHECK(res.constant > 0.0);
  CHECK(res.constant < 10.0);
  CHECK(res.t_grid.back() == 10.0);
  CHECK(res.seeds == std::vector<std::uint64_t>{1, 2, 3});
  auto again = verify_forcing_bound(GSpec::navier_stokes(3), 10.0, 3, fam);
  CHECK(again.curve == res.curve);
  ForcingFamily bad = fam;
  bad.max_wavenumber = 4;
  CHECK_THROWS_AS(verify_forcing_bound(GSpec::navier_stokes(3), 1.0, 1, bad), std::invalid_argument);
  CHECK_THROWS_AS(verify_forcing_bound(GSpec::navier_stokes(3), 0.0, 1, fam), std::invalid_argument);
}

TEST_CASE("window constants are exact arithmetic") {
  CHECK(solution_window(2.0) == 1.0 / 256.0);
  CHECK(solution_window(1.0) == 1.0 / 16.0);
  CHECK(g_system_window(1.0, 6.0) == 1.0 / 576.0);
  CHECK(g_system_window(0.5, 2.0) == 1.0 / 16.0);
  CHECK_THROWS_AS(solution_window(0.0), std::invalid_argument);
  CHECK_THROWS_AS(g_system_window(1.0, 0.0), std::invalid_argument);

  SemigroupConstants s;
  s.j_max = 1;
  s.plain = {1.0, 0.3};
  s.projected = {1.1, 0.25};
  ForcingBound fb;
  fb.constant = 0.2;
  CHECK(solution_constant(s, fb) == 1.0);
  fb.constant = 1.5;
  CHECK(solution_constant(s, fb) == 1.5);
  s.projected[1] = 2.5;
  CHECK(solution_constant(s, fb) == 2.5);
}

TEST_CASE("V trace") {
  auto g = TorusGrid::make(3, 8);
  auto cfg = run_config(3, 8, 1.0, 0.1, 1);
  auto zero = integrate(SpectralVector::zeros(g), Dynamics::heat(), cfg);
  for (const auto& v : compute_V(zero)) CHECK(v.v == 0.0);

  auto heat = integrate(shear_mode(g), Dynamics::heat(), cfg);
  auto V = compute_V(heat);
  REQUIRE(V.size() == heat.diagnostics.size());
  for (const auto& v : V) CHECK(v.v == doctest::Approx(std::exp(-v.t) * (1.0 + std::sqrt(v.t))).epsilon(1e-13));

  cfg.j_max = 0;
  auto bare = integrate(shear_mode(g), Dynamics::heat(), cfg);
  CHECK_THROWS_AS(compute_V(bare), std::invalid_argument);
}

TEST_CASE("theorem bounds on a small scaling orbit") {
  TheoremBoundsConfig cfg;
  cfg.amplitudes = {2.0, 1.0};
  cfg.seeds = {4};
  cfg.modes = 16;
  cfg.steps = 32;
  cfg.diagnostics_every = 2;
  auto res = verify_theorem_bounds(cfg);
  CHECK(res.c0 == 1.0 / 16.0);
  REQUIRE(res.runs.size() == 2);
  CHECK(res.runs[0].amplitude == 1.0);  // sorted by (seed, amplitude)
  CHECK(res.runs[0].end_time == res.c0);
  CHECK(res.runs[1].end_time == res.c0 / 4.0);
  CHECK(res.early_terminations == 0);
  CHECK(res.k[0] <= 2.0);
  CHECK(res.v_ratio < 2.0);
  CHECK(res.heat_control_error <= 1e-10);
  // Both runs lie on one scaling orbit; only sampling of the sup norm separates them.
  for (double s : res.spread) CHECK(s <= 1.5);

  std::ostringstream csv;
  write_collapse_csv(csv, res);
  std::string header;
  std::istringstream in(csv.str());
  std::getline(in, header);
  CHECK(header == "amplitude,seed,t,scaled_t,k0,k1,k2,k3");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == static_cast<int>(res.runs[0].t.size() + res.runs[1].t.size()));

  auto bad = cfg;
  bad.amplitudes = {1.0, 2.5};
  CHECK_THROWS_AS(verify_theorem_bounds(bad), std::invalid_argument);
  bad = cfg;
  bad.amplitudes = {1.0, 8.0};  // dilated band 8 exceeds 16/3
  CHECK_THROWS_AS(verify_theorem_bounds(bad), std::invalid_argument);
  bad = cfg;
  bad.seeds.clear();
  CHECK_THROWS_AS(verify_theorem_bounds(bad), std::invalid_argument);
  bad = cfg;
  bad.family = CollapseFamily::fixed_profile;
  bad.amplitudes = {1.0, 2.5};
  CHECK_NOTHROW(bad.validate());
  CHECK(parse_collapse_family("fixed_profile") == CollapseFamily::fixed_profile);
  CHECK_THROWS_AS(parse_collapse_family("orbit"), std::invalid_argument);
}

TEST_CASE("scaling check") {
  auto g = TorusGrid::make(3, 16);
  ScalingCheckConfig cfg;
  cfg.base = run_config(3, 16, 0.2, 0.02, 2);
  cfg.base.snapshot_every = 5;
  auto f = taylor_green(g);

  cfg.lambda = 1.0;
  auto same = scaling_check(f, cfg);
  for (double m : same.max_mismatch) CHECK(m == 0.0);
  CHECK(same.pressure_mismatch == 0.0);

  cfg.lambda = 2.0;
  auto res = scaling_check(f, cfg);
  CHECK(res.lambda == 2);
  CHECK(res.t.size() == 11);
  CHECK(res.pressure_t.size() == 3);
  for (double m : res.max_mismatch) CHECK(m <= 1e-6);
  CHECK(res.pressure_mismatch <= 1e-6);

  cfg.lambda = 2.5;
  CHECK_THROWS_AS(scaling_check(f, cfg), std::invalid_argument);
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(scaling_check(f, cfg), std::invalid_argument);
}

TEST_CASE("future control: heat decay, errors and scale invariance") {
  const double c0 = 1.0 / 16.0;
  auto g = TorusGrid::make(3, 8);
  auto heat = integrate(shear_mode(g), Dynamics::heat(), run_config(3, 8, 1.0, 0.01, 1));
  auto fc = future_control_check(heat, 0, 0.5, c0);
  CHECK(fc.ratio <= 1.0);
  CHECK(fc.window_start == doctest::Approx(c0 / 2.0).epsilon(1e-14));
  CHECK(fc.t1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fc.tau == doctest::Approx(c0 * std::exp(1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(future_control_check(heat, 0, 0.01, c0), std::invalid_argument);
  CHECK_THROWS_AS(future_control_check(heat, 0, 0.99, c0), std::invalid_argument);
  CHECK_THROWS_AS(future_control_check(heat, 2, 0.5, c0), std::invalid_argument);

  // The whole experiment rescaled by lambda = 2 gives the same ratio.
  auto f = random_bandlimited(TorusGrid::make(2, 16), 5, 2, 1.0);
  auto f2 = dilate(f, 2, 2.0, TorusGrid::make(2, 32));
  auto a = simulate(f, run_config(2, 16, 0.5, 0.005, 2));
  auto b = simulate(f2, run_config(2, 32, 0.5 / 4.0, 0.005 / 4.0, 2));
  for (int j = 0; j <= 2; ++j) {
    auto ra = future_control_check(a, j, 0.1, c0);
    auto rb = future_control_check(b, j, 0.1 / 4.0, c0);
    CHECK(std::abs(ra.ratio - rb.ratio) <= 1e-6 * ra.ratio);
  }
}

TEST_CASE("future control on 3D Taylor-Green is stable under refinement") {
  const double c0 = 1.0 / 16.0;
  double ratio[2];
  int modes[2] = {16, 32};
  for (int r = 0; r < 2; ++r) {
    auto g = TorusGrid::make(3, modes[r]);
    auto traj = simulate(taylor_green(g), run_config(3, modes[r], 0.25, 0.01, 1));
    ratio[r] = future_control_check(traj, 1, 0.1, c0).ratio;
    CHECK(std::isfinite(ratio[r]));
  }
  CHECK(std::abs(ratio[1] / ratio[0] - 1.0) <= 0.05);
}

TEST_CASE("beta integral by Gauss-Jacobi") {
  for (double t : {1e-3, 0.1, 1.0, 7.0}) {
    auto r = verify_beta_integral(t, 4);
    CHECK(r.error <= 1e-8);
  }
  CHECK(verify_beta_integral(1.0, 1).error <= 1e-12);
}

TEST_CASE("kernel duality on a coarse grid") {
  KernelDualityConfig cfg;
  cfg.x_points = 5;
  cfg.t_points = 5;
  auto r = kernel_duality(cfg);
  CHECK(r.evaluations == 75);
  CHECK(r.worst <= 1e-10);
  CHECK(r.max_relative.size() == 3);
  cfg.t_min = 0.0;
  CHECK_THROWS_AS(kernel_duality(cfg), std::invalid_argument);
  cfg.t_min = 0.05;
  cfg.dims = {4};
  CHECK_THROWS_AS(kernel_duality(cfg), std::invalid_argument);
}

TEST_CASE("verdicts and report serialization") {
  CHECK(make_verdict("a", 1.0, "<=", 1.0, "x").passed);
  CHECK_FALSE(make_verdict("a", 1.0, "<", 1.0, "x").passed);
  CHECK_FALSE(make_verdict("a", std::nan(""), "<=", 1.0, "x").passed);
  CHECK_FALSE(make_verdict("a", std::nan(""), "finite", 0.0, "x").passed);
  CHECK(make_verdict("a", 0.0, "==", 0.0, "x").passed);
  CHECK_THROWS_AS(make_verdict("a", 0.0, "~", 0.0, "x"), std::invalid_argument);

  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");

  auto build = [] {
    EstimateReport rep;
    rep.experiment = "verify-kernel";
    rep.config_hash = fnv1a_hex("{}");
    add_to_report(rep, verify_beta_integral(1.0, 8));
    KernelDualityConfig kc;
    kc.x_points = 3;
    kc.t_points = 3;
    add_to_report(rep, kernel_duality(kc));
    return rep;
  };
  auto rep = build();
  CHECK(rep.passed());
  auto j = rep.to_json();
  CHECK(j["schema_version"] == EstimateReport::schema_version);
  for (const auto& v : j["verdicts"]) CHECK(j["traces"].contains(v["evidence"].get<std::string>()));
  CHECK(j.dump() == build().to_json().dump());
  rep.verdicts.push_back(make_verdict("forced", 2.0, "<=", 1.0, "beta_integral"));
  CHECK_FALSE(rep.passed());
}
