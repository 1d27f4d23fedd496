#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "torusns/gspec.hpp"
#include "torusns/initial_data.hpp"
#include "torusns/kernels.hpp"
#include "torusns/picard.hpp"
#include "torusns/quadrature.hpp"
#include "torusns/solver.hpp"

using namespace torusns;

namespace {

SolverConfig config(int dim, int modes, double T, double dt) {
  SolverConfig c;
  c.dim = dim;
  c.modes = modes;
  c.end_time = T;
  c.dt = dt;
  c.j_max = 2;
  return c;
}

}  // namespace

TEST_CASE("initial field construction") {
  auto g = TorusGrid::make(3, 32);
  auto tg = make_initial_field(g, {InitialKind::taylor_green, 0, 0, 2.0});
  CHECK(sup_norm(tg) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sup_norm(divergence(tg)) < 1e-15);
  auto ref = testing::sampled(g, {[](auto x) { return std::cos(x[0]) * std::sin(x[1]) * std::sin(x[2]); },
                                  [](auto x) { return -std::sin(x[0]) * std::cos(x[1]) * std::sin(x[2]); }});
  CHECK(testing::diff(0.5 * tg, ref) < 1e-15);

  InitialSpec rs{InitialKind::random_bandlimited, 1, 4, 1.0};
  auto r = make_initial_field(g, rs);
  CHECK(sup_norm(divergence(r)) <= 1e-12);
  CHECK(std::abs(sup_norm(r) - 1.0) <= 1e-9);
  CHECK(conjugate_symmetry_defect(r) < 1e-15);
  CHECK(testing::coeff_diff(r, make_initial_field(g, rs)) == 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto k = g.wavevector(i);
    if (std::abs(k[0]) > 4 || std::abs(k[1]) > 4 || std::abs(k[2]) > 4) CHECK(std::abs(r[0][i]) == 0.0);
  }
  rs.amplitude = 0.0;
  CHECK_THROWS_AS(make_initial_field(g, rs), std::invalid_argument);
  rs.amplitude = -1.0;
  CHECK_THROWS_AS(make_initial_field(g, rs), std::invalid_argument);
}

TEST_CASE("dilation moves modes and rejects lattice overflow") {
  auto g = TorusGrid::make(2, 16);
  auto f = taylor_green(g);
  auto fine = TorusGrid::make(2, 32);
  auto d = dilate(f, 2, 2.0, fine);
  auto expect = testing::sampled(fine, {[](auto x) { return 2 * std::cos(2 * x[0]) * std::sin(2 * x[1]); },
                                        [](auto x) { return -2 * std::sin(2 * x[0]) * std::cos(2 * x[1]); }});
  CHECK(testing::diff(d, expect) < 1e-14);
  CHECK_THROWS_AS(dilate(random_modes(g, 1, 6), 2, 1.0, g), std::invalid_argument);
  CHECK_THROWS_AS(dilate(f, 0, 1.0, g), std::invalid_argument);
}

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.end_time = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.blowup_threshold = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.order = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("linear part is exact") {
  auto g = TorusGrid::make(3, 16);
  auto f = random_bandlimited(g, 3, 4, 1.0);
  auto u = step(f, 0.37, Dynamics::heat());
  CHECK(testing::coeff_diff(u, apply_heat_semigroup(f, 0.37)) < 1e-16);

  auto c = config(3, 16, 0.5, 0.05);
  auto tr = integrate(f, Dynamics::heat(), c);
  CHECK(testing::coeff_diff(tr.final().u, apply_heat_semigroup(f, 0.5)) < 1e-15);
}

TEST_CASE("2D Taylor-Green decays as exp(-2t)") {
  auto c = config(2, 32, 1.0, 0.01);
  auto f = taylor_green(c.grid(), 1.0);
  auto tr = simulate(f, c);
  CHECK(!tr.terminated_early);
  CHECK(tr.final().t == 1.0);
  CHECK(testing::diff(tr.final().u, std::exp(-2.0) * f) <= 1e-10);
}

TEST_CASE("zero data stays zero") {
  auto c = config(3, 16, 0.2, 0.01);
  auto tr = simulate(SpectralVector::zeros(c.grid()), c);
  CHECK(sup_norm(tr.final().u) == 0.0);
  CHECK(!tr.terminated_early);
}

TEST_CASE("simulate rejects non-solenoidal data and mismatched grids") {
  auto c = config(3, 16, 0.1, 0.01);
  auto g = c.grid();
  CHECK_THROWS_AS(simulate(normalize_sup(random_modes(g, 1, 3), 1.0), c), std::invalid_argument);
  CHECK_THROWS_AS(simulate(taylor_green(TorusGrid::make(3, 8)), c), std::invalid_argument);
}

TEST_CASE("trajectory invariants along a Navier-Stokes run") {
  auto c = config(3, 16, 0.5, 0.01);
  c.snapshot_every = 10;
  auto g = c.grid();
  auto f = random_bandlimited(g, 5, 3, 2.0);
  auto tr = simulate(f, c);
  REQUIRE(!tr.terminated_early);
  CHECK(tr.samples.size() == 6);
  CHECK(tr.diagnostics.size() == 51);
  auto mean0 = mean_mode(f);
  double prev_t = -1.0;
  double prev_e = 1e300;
  for (const auto& d : tr.diagnostics) {
    CHECK(d.t > prev_t);
    CHECK(d.divergence_residual <= 1e-11);
    CHECK(d.energy < prev_e);
    CHECK(d.dj_sup.size() == 2);
    prev_t = d.t;
    prev_e = d.energy;
  }
  for (const auto& s : tr.samples) {
    auto m = mean_mode(s.u);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(m[static_cast<std::size_t>(i)] - mean0[static_cast<std::size_t>(i)]) <= 1e-12);
    CHECK(sup_norm(divergence(s.u)) <= 1e-12);
  }
}

TEST_CASE("mean momentum is conserved with a nonzero mean") {
  auto c = config(3, 16, 0.3, 0.01);
  auto g = c.grid();
  auto f = random_bandlimited(g, 6, 3, 1.0);
  f[0][0] = 0.3;
  f[2][0] = -0.2;
  auto tr = simulate(f, c);
  auto m = mean_mode(tr.final().u);
  CHECK(std::abs(m[0] - 0.3) <= 1e-12);
  CHECK(std::abs(m[2] + 0.2) <= 1e-12);
}

TEST_CASE("small data runs through the local existence window") {
  auto c = config(3, 16, 1.0 / 16.0 / 0.01, 0.02);
  c.diagnostics_every = 50;
  auto f = random_bandlimited(c.grid(), 2, 3, 0.1);
  auto tr = simulate(f, c);
  CHECK(!tr.terminated_early);
  CHECK(tr.max_sup <= 0.1 * (1 + 1e-12));
}

TEST_CASE("blow-up threshold terminates the run") {
  auto c = config(3, 16, 0.5, 0.01);
  auto f = random_bandlimited(c.grid(), 2, 3, 1.0);
  c.blowup_threshold = 0.5;
  auto tr = simulate(f, c);
  CHECK(tr.terminated_early);
  CHECK(tr.termination_time > 0.0);
  CHECK(tr.termination_reason.find("blow-up") != std::string::npos);
  CHECK(tr.final().t == tr.termination_time);
}

TEST_CASE("default time step") {
  auto g = TorusGrid::make(3, 32);
  auto f = taylor_green(g, 1.0);
  double kmax = 10.0;
  double max_hat = 0.25 * 1.0;
  CHECK(default_time_step(f, true) == doctest::Approx(0.25 / (3 * kmax * kmax + kmax * max_hat)));
}

TEST_CASE("integrating-factor orders") {
  auto c = config(3, 16, 0.25, 0.0);
  c.diagnostics_every = 0;
  c.j_max = 0;
  auto f = random_bandlimited(c.grid(), 1, 2, 1.0);
  c.dt = 0.25 / 256;
  auto ref = simulate(f, c).final().u;
  for (int order : {1, 2, 4}) {
    c.order = order;
    c.dt = 0.25 / 8;
    double e1 = testing::diff(simulate(f, c).final().u, ref);
    c.dt = 0.25 / 16;
    double e2 = testing::diff(simulate(f, c).final().u, ref);
    CHECK(std::log2(e1 / e2) == doctest::Approx(order).epsilon(0.15));
  }
}

TEST_CASE("g-system with the Navier-Stokes encoding reproduces simulate") {
  auto gs = GSpec::navier_stokes(3);
  CHECK(gs.c_g() == doctest::Approx(6.0).epsilon(1e-12));
  auto c = config(3, 16, 0.2, 0.01);
  auto f = random_bandlimited(c.grid(), 4, 3, 1.0);
  auto a = simulate(f, c);
  auto b = simulate_g_system(f, gs, c);
  CHECK(testing::diff(a.final().u, b.final().u) <= 1e-9);
}

TEST_CASE("g-system with zero coefficients is heat flow") {
  std::vector<GTerm> terms(1);
  GSpec zero(3, terms);
  CHECK(zero.c_g() == 0.0);
  auto c = config(3, 16, 0.3, 0.05);
  auto f = normalize_sup(random_modes(c.grid(), 4, 3), 1.0);
  auto tr = simulate_g_system(f, zero, c);
  CHECK(testing::coeff_diff(tr.final().u, apply_heat_semigroup(f, 0.3)) < 1e-15);
}

TEST_CASE("quadratic form bound dominates sampled values") {
  GTerm t;
  t.axis = 1;
  t.a[0][0][1] = 1.5;
  t.a[1][2][2] = -0.7;
  t.a[2][1][0] = 0.4;
  GSpec gs(3, {t});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::array<double, 3> u{n(rng), n(rng), n(rng)};
    double uu = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    auto gu = gs.evaluate(0, u);
    double gn = std::sqrt(gu[0] * gu[0] + gu[1] * gu[1] + gu[2] * gu[2]);
    CHECK(gn <= gs.c_g() * uu * (1 + 1e-12));
  }
  CHECK_THROWS_AS(GSpec(3, {}), std::invalid_argument);
  t.axis = 3;
  CHECK_THROWS_AS(GSpec(3, {t}), std::invalid_argument);
}

TEST_CASE("Gauss-Jacobi quadrature") {
  auto gl = gauss_legendre(8);
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.size(); ++i) sum += gl.weights[i] * std::pow(gl.nodes[i], 14);
  CHECK(sum == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
  // int_0^t (t-s)^{-1/2} s^{-1/2} ds = pi, and with s^{1/2}, t pi / 2.
  for (double t : {0.01, 1.0, 7.0}) {
    CHECK(std::abs(singular_integral([](double) { return 1.0; }, t, -0.5, -0.5, 4) - std::numbers::pi) <= 1e-12);
    CHECK(std::abs(singular_integral([](double) { return 1.0; }, t, -0.5, 0.5, 4) - t * std::numbers::pi / 2) <= 1e-12 * t);
  }
  CHECK_THROWS_AS(gauss_jacobi(3, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("composite Simpson weights") {
  for (std::size_t n : {3u, 4u, 5u, 8u, 11u}) {
    double h = 1.0 / static_cast<double>(n - 1);
    auto w = composite_simpson_weights(n, h);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * std::pow(h * static_cast<double>(i), 3);
    CHECK(s == doctest::Approx(0.25).epsilon(1e-14));
  }
  CHECK_THROWS_AS(composite_simpson_weights(2, 0.1), std::invalid_argument);
}

TEST_CASE("first Picard iterate") {
  auto g = TorusGrid::make(3, 16);
  auto f = random_bandlimited(g, 1, 2, 1.0);
  const double t = 0.01;
  auto r = picard_solve(f, t, 1, 8);
  // Reference: u^1(t) = e^{t Lap} f + int_0^t e^{(t-s) Lap} N(e^{s Lap} f) ds with a
  // 64-point Gauss-Legendre rule applied directly to the integrand.
  auto rule = gauss_legendre(64, 0.0, t);
  auto ref = apply_heat_semigroup(f, t);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    auto nl = nonlinear_term(apply_heat_semigroup(f, rule.nodes[q]));
    ref.axpy(rule.weights[q], apply_heat_semigroup(nl, t - rule.nodes[q]));
  }
  CHECK(testing::diff(r.u, ref) <= 1e-13);
}

TEST_CASE("Picard iteration contracts and matches the integrator") {
  auto g = TorusGrid::make(3, 16);
  auto f = random_bandlimited(g, 1, 2, 1.0);
  auto r = picard_solve(f, 0.01, 6, 8);
  CHECK(!r.diverged);
  for (std::size_t m = 1; m < r.increments.size(); ++m) {
    if (r.increments[m - 1] > 1e-13) CHECK(r.increments[m] < 0.1 * r.increments[m - 1]);
  }
  auto c = config(3, 16, 0.01, 1e-4);
  CHECK(testing::diff(r.u, simulate(f, c).final().u) <= 1e-8);
  CHECK_THROWS_AS(picard_solve(f, 0.2, 6, 8), std::invalid_argument);
  CHECK_THROWS_AS(picard_solve(f, 0.01, 0, 8), std::invalid_argument);
}

TEST_CASE("Picard divergence is reported") {
  auto g = TorusGrid::make(2, 16);
  auto f = random_bandlimited(g, 3, 3, 0.3);
  // A strongly scaled nonlinearity keeps t |f|^2 inside the precondition while
  // the fixed-point map stops contracting.
  std::vector<GTerm> terms;
  auto ns = GSpec::navier_stokes(2);
  for (const auto& t : ns.terms()) {
    GTerm s = t;
    for (auto& m : s.a) {
      for (auto& row : m) {
        for (auto& v : row) v *= 200.0;
      }
    }
    terms.push_back(s);
  }
  auto r = picard_solve(f, 1.0, 12, 8, Dynamics::g_system(GSpec(2, terms)));
  CHECK(r.diverged);
}

TEST_CASE("Duhamel residual") {
  auto g = TorusGrid::make(3, 16);
  auto f = random_bandlimited(g, 1, 2, 1.0);
  auto c = config(3, 16, 0.01, 1.25e-4);
  c.diagnostics_every = 0;

  auto lin = integrate(f, Dynamics::heat(), [&] { auto k = c; k.snapshot_every = 10; return k; }());
  CHECK(duhamel_residual(lin) <= 1e-12);

  std::vector<double> res;
  for (int every : {16, 8, 4}) {
    c.snapshot_every = every;
    res.push_back(duhamel_residual(simulate(f, c)));
  }
  CHECK(res[1] < res[0]);
  CHECK(res[2] < res[1]);
  CHECK(std::log2(res[1] / res[2]) > 3.5);

  c.snapshot_every = 8;
  auto tr = simulate(f, c);
  tr.samples.back().u *= 1.01;
  CHECK(duhamel_residual(tr) > 1e-3);

  auto tg = simulate(taylor_green(TorusGrid::make(2, 32), 1.0), [] {
    auto k = config(2, 32, 0.5, 0.01);
    k.snapshot_every = 5;
    return k;
  }());
  CHECK(duhamel_residual(tg) <= 1e-13);

  c.snapshot_every = 0;
  CHECK_THROWS_AS(duhamel_residual(simulate(f, c)), std::invalid_argument);
}

TEST_CASE("trace CSV layout") {
  auto c = config(2, 16, 0.02, 0.01);
  auto tr = simulate(taylor_green(c.grid(), 1.0), c);
  std::ostringstream os;
  write_trace_csv(os, tr);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,sup_u,d1_sup,d2_sup,divergence_residual,energy");
  int rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("trajectories are bit-identical across execution modes") {
  auto c = config(3, 16, 0.05, 0.01);
  auto f = random_bandlimited(c.grid(), 9, 3, 1.0);
  SpectralVector a, b;
  {
    kernels::ScopedExecution mode(kernels::Execution::serial);
    a = simulate(f, c).final().u;
  }
  {
    kernels::ScopedExecution mode(kernels::Execution::parallel);
    b = simulate(f, c).final().u;
  }
  CHECK(testing::coeff_diff(a, b) == 0.0);
  CHECK(testing::coeff_diff(simulate(f, c).final().u, b) == 0.0);
}
