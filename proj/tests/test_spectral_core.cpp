#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"
#include "torusns/fft.hpp"
#include "torusns/initial_data.hpp"
#include "torusns/kernels.hpp"
#include "torusns/snapshot.hpp"
#include "torusns/spectral.hpp"

using namespace torusns;
using std::numbers::pi;

TEST_CASE("grid construction") {
  auto g = TorusGrid::make(2, 8);
  CHECK(g.size() == 64);
  CHECK(g.wavenumber(0) == 0);
  CHECK(g.wavenumber(4) == 4);
  CHECK(g.wavenumber(5) == -3);
  CHECK(g.wavenumber(7) == -1);
  CHECK(TorusGrid::make(3, 16).size() == 4096);
  CHECK_THROWS_AS(TorusGrid::make(3, 7), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid::make(3, 6), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid::make(4, 8), std::invalid_argument);
  CHECK(g.point(2) == doctest::Approx(2.0 * pi * 2 / 8));
}

TEST_CASE("lattice is symmetric except for the Nyquist index") {
  auto g = TorusGrid::make(3, 8);
  std::size_t unpaired = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    auto k = g.wavevector(idx);
    Wavevector mk{-k[0], -k[1], -k[2]};
    if (g.index_of(mk) == g.size()) {
      ++unpaired;
      bool has_nyq = k[0] == 4 || k[1] == 4 || k[2] == 4;
      CHECK(has_nyq);
    } else {
      CHECK(g.index_of(mk) == g.conjugate_index(idx));
    }
    CHECK(g.index_of(k) == idx);
  }
  CHECK(unpaired > 0);
}

TEST_CASE("multi-index enumeration") {
  CHECK(multi_indices(3, 0).size() == 1);
  CHECK(multi_indices(3, 2).size() == 6);
  CHECK(multi_indices(3, 4).size() == 15);
  CHECK(multi_indices(2, 3).size() == 4);
  for (const auto& a : multi_indices(3, 3)) CHECK(a.order() == 3);
}

TEST_CASE("forward transform of cos x1 and of a constant") {
  auto g = TorusGrid::make(3, 8);
  auto c = forward_transform(RealField::sample(g, [](auto x) { return std::cos(x[0]); }));
  CHECK(std::abs(c.at({1, 0, 0}) - Complex(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(c.at({-1, 0, 0}) - Complex(0.5, 0.0)) < 1e-15);
  double rest = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto k = g.wavevector(i);
    if (std::abs(k[0]) == 1 && k[1] == 0 && k[2] == 0) continue;
    rest = std::max(rest, std::abs(c[i]));
  }
  CHECK(rest < 1e-15);

  auto one = forward_transform(RealField::sample(g, [](auto) { return 1.0; }));
  CHECK(std::abs(one[0] - 1.0) < 1e-15);
  CHECK_THROWS_AS(c.at({5, 0, 0}), std::out_of_range);
}

TEST_CASE("transforms match a direct DFT sum on M = 8") {
  for (int dim : {2, 3}) {
    auto g = TorusGrid::make(dim, 8);
    auto u = random_modes(g, 11, 3);
    auto real = inverse_transform(u[0]);
    auto direct = oracle::direct_inverse(u[0]);
    CHECK(oracle::max_abs_diff(direct, real.values()) < 1e-12);

    auto back = forward_transform(real);
    auto ref = oracle::direct_forward(real);
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(back[i] - ref[i]));
    CHECK(m < 1e-13);
  }
}

TEST_CASE("round trip of band-limited fields") {
  auto g = TorusGrid::make(3, 16);
  auto u = random_modes(g, 3, 7);
  for (const auto& c : u) {
    auto r = inverse_transform(c);
    auto r2 = inverse_transform(forward_transform(r));
    CHECK(oracle::max_abs_diff(std::vector<double>(r.values().begin(), r.values().end()), r2.values()) < 1e-12);
  }
  CHECK(conjugate_symmetry_defect(u) < 1e-15);
}

TEST_CASE("spectral derivative examples") {
  auto g = TorusGrid::make(3, 16);
  auto s = testing::sampled_scalar(g, [](auto x) { return std::sin(x[0]); });
  auto c = testing::sampled_scalar(g, [](auto x) { return std::cos(x[0]); });
  CHECK(testing::diff(spectral_derivative(s, MultiIndex::unit(0)), c) < 1e-14);

  auto one = testing::sampled_scalar(g, [](auto) { return 3.0; });
  for (int order = 1; order <= 3; ++order) {
    for (const auto& a : multi_indices(3, order)) CHECK(sup_norm(spectral_derivative(one, a)) < 1e-14);
  }

  SpectralField e(g);
  e.at({2, 1, 0}) = 1.0;
  auto de = spectral_derivative(e, MultiIndex::unit(0) + MultiIndex::unit(1));
  CHECK(std::abs(de.at({2, 1, 0}) - Complex(-2.0, 0.0)) < 1e-15);
}

TEST_CASE("Nyquist coefficient is zeroed by odd-order derivatives only") {
  auto g = TorusGrid::make(2, 8);
  SpectralField f(g);
  f.at({4, 0, 0}) = 1.0;  // cos(4 x1) sampled on 8 points
  CHECK(sup_norm(spectral_derivative(f, MultiIndex::unit(0))) == 0.0);
  CHECK(sup_norm(spectral_derivative(f, MultiIndex::unit(0, 3))) == 0.0);
  CHECK(std::abs(spectral_derivative(f, MultiIndex::unit(0, 2)).at({4, 0, 0}) - Complex(-16.0, 0.0)) < 1e-14);
}

TEST_CASE("derivative linearity and mixed-partial commutation") {
  auto g = TorusGrid::make(3, 16);
  auto u = random_modes(g, 5, 5);
  auto a = MultiIndex::unit(0, 2) + MultiIndex::unit(2);
  auto b = MultiIndex::unit(1) + MultiIndex::unit(2);
  auto lhs = spectral_derivative(2.0 * u[0] + (-3.0) * u[1], a);
  auto rhs = 2.0 * spectral_derivative(u[0], a) + (-3.0) * spectral_derivative(u[1], a);
  CHECK(testing::diff(lhs, rhs) < 1e-10 * sup_norm(rhs));
  auto ab = spectral_derivative(spectral_derivative(u[2], a), b);
  auto direct = spectral_derivative(u[2], a + b);
  CHECK(testing::diff(ab, direct) <= 1e-14 * sup_norm(direct));
  CHECK(spectral_derivative(u, a)[0].conjugate_symmetry_defect() < 1e-12);
}

TEST_CASE("sup norm examples") {
  auto g = TorusGrid::make(3, 16);
  CHECK(sup_norm(testing::sampled(g, {[](auto x) { return std::sin(x[0]); }})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sup_norm(SpectralVector::zeros(g)) == 0.0);
  auto tg = testing::sampled(g, {[](auto x) { return std::cos(x[0]) * std::sin(x[1]); },
                                 [](auto x) { return -std::sin(x[0]) * std::cos(x[1]); }});
  // Dense-sampling oracle: evaluate |u| on a 10x finer grid.
  double dense = 0.0;
  const int fine = 160;
  for (int i = 0; i < fine; ++i) {
    for (int j = 0; j < fine; ++j) {
      double x = 2 * pi * i / fine, y = 2 * pi * j / fine;
      double a = std::cos(x) * std::sin(y), b = -std::sin(x) * std::cos(y);
      dense = std::max(dense, std::hypot(a, b));
    }
  }
  CHECK(sup_norm(tg) == doctest::Approx(dense).epsilon(1e-12));
  CHECK(dense == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sup norm is a norm on sampled data") {
  auto g = TorusGrid::make(3, 16);
  auto u = random_modes(g, 21, 4);
  auto v = random_modes(g, 22, 4);
  CHECK(sup_norm(u + v) <= sup_norm(u) + sup_norm(v));
  CHECK(sup_norm((-2.5) * u) == doctest::Approx(2.5 * sup_norm(u)).epsilon(1e-14));
}

TEST_CASE("dj sup norm examples") {
  auto g = TorusGrid::make(3, 16);
  auto s1 = testing::sampled(g, {[](auto x) { return std::sin(x[0]); }});
  auto s2 = testing::sampled(g, {[](auto x) { return std::sin(2 * x[0]); }});
  CHECK(dj_sup_norm(s1, 0) == sup_norm(s1));
  CHECK(dj_sup_norm(s1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dj_sup_norm(s2, 2) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("dj sup norm equals a brute-force loop over multi-indices") {
  auto g = TorusGrid::make(3, 16);
  auto u = random_modes(g, 8, 4);
  auto all = dj_sup_norms(u, 4);
  for (int j = 0; j <= 4; ++j) {
    double brute = 0.0;
    for (const auto& a : multi_indices(3, j)) {
      auto du = spectral_derivative(u, a);
      auto phys = inverse_transform(du);
      for (std::size_t p = 0; p < g.size(); ++p) {
        double s = 0.0;
        for (const auto& c : phys) s += c[p] * c[p];
        brute = std::max(brute, std::sqrt(s));
      }
    }
    CHECK(dj_sup_norm(u, j) == doctest::Approx(brute).epsilon(1e-13));
    CHECK(all[static_cast<std::size_t>(j)] == doctest::Approx(brute).epsilon(1e-13));
  }
}

TEST_CASE("divergence examples") {
  auto g = TorusGrid::make(3, 16);
  CHECK(sup_norm(divergence(testing::sampled(g, {[](auto x) { return std::sin(x[1]); }}))) < 1e-15);
  auto d = divergence(testing::sampled(g, {[](auto x) { return std::sin(x[0]); }}));
  CHECK(testing::diff(d, testing::sampled_scalar(g, [](auto x) { return std::cos(x[0]); })) < 1e-14);
}

TEST_CASE("two-thirds dealiasing") {
  auto g = TorusGrid::make(3, 16);
  SpectralField f(g);
  f.at({1, 0, 0}) = 1.0;
  f.at({-1, 0, 0}) = 1.0;
  CHECK(testing::diff(dealias(f), f) == 0.0);
  SpectralField h(g);
  h.at({7, 0, 0}) = 1.0;
  CHECK(std::abs(dealias(h).at({7, 0, 0})) == 0.0);
  CHECK(survives_dealiasing(g, {5, -5, 0}));
  CHECK(!survives_dealiasing(g, {6, 0, 0}));

  // sin(5x)^2 = 1/2 - cos(10x)/2. On M = 16 the k = 10 content aliases to
  // k = -6; the truncated product must match the fine-grid product restricted
  // to |k| <= 5, which is the constant 1/2.
  auto sq = forward_transform(RealField::sample(g, [](auto x) { return std::sin(5 * x[0]) * std::sin(5 * x[0]); }));
  auto fine = TorusGrid::make(3, 64);
  auto sq_fine = forward_transform(RealField::sample(fine, [](auto x) { return std::sin(5 * x[0]) * std::sin(5 * x[0]); }));
  CHECK(std::abs(sq.at({-6, 0, 0})) > 0.1);
  auto d = dealias(sq);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto k = g.wavevector(i);
    Complex ref = survives_dealiasing(g, k) ? sq_fine.at(k) : Complex{};
    CHECK(std::abs(d[i] - ref) < 1e-14);
  }
}

TEST_CASE("energy and mean mode") {
  auto g = TorusGrid::make(2, 16);
  auto u = testing::sampled(g, {[](auto x) { return std::sin(x[0]); }, [](auto) { return 2.0; }});
  // mean of |u|^2 / 2 = (1/2 + 4) / 2
  CHECK(energy(u) == doctest::Approx(2.25).epsilon(1e-14));
  auto m = mean_mode(u);
  CHECK(m[0] == doctest::Approx(0.0));
  CHECK(m[1] == doctest::Approx(2.0));
}

TEST_CASE("serial and parallel kernels are bit-identical") {
  auto g = TorusGrid::make(3, 16);
  auto u = random_modes(g, 9, 5);
  std::vector<double> serial, parallel;
  SpectralField dser, dpar;
  {
    kernels::ScopedExecution mode(kernels::Execution::serial);
    serial = dj_sup_norms(u, 3);
    dser = spectral_derivative(u[1], MultiIndex::unit(2, 3));
  }
  {
    kernels::ScopedExecution mode(kernels::Execution::parallel);
    parallel = dj_sup_norms(u, 3);
    dpar = spectral_derivative(u[1], MultiIndex::unit(2, 3));
  }
  CHECK(serial == parallel);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(dser[i] == dpar[i]);
}

TEST_CASE("snapshot round trip") {
  auto g = TorusGrid::make(2, 8);
  auto u = random_modes(g, 4, 2);
  std::stringstream ss;
  write_snapshot(ss, u);
  CHECK(ss.str().size() == kSnapshotHeaderBytes + 2 * 64 * 16);
  CHECK(ss.str().substr(0, 4) == "PFLD");
  auto snap = read_snapshot(ss);
  CHECK(snap.header.dim == 2);
  CHECK(snap.header.modes == 8);
  CHECK(snap.header.layout == SnapshotLayout::spectral);
  const auto& back = std::get<SpectralVector>(snap.field);
  CHECK(testing::coeff_diff(back, u) == 0.0);

  std::stringstream rs;
  auto real = inverse_transform(u);
  write_snapshot(rs, real);
  auto rsnap = read_snapshot(rs);
  const auto& rback = std::get<RealVector>(rsnap.field);
  for (int c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(rback[c][i] == real[c][i]);
  }

  std::stringstream scalar;
  write_snapshot(scalar, real[0]);
  CHECK(std::get<RealVector>(read_snapshot(scalar).field).size() == 1);
}

TEST_CASE("snapshot reader rejects malformed input") {
  std::stringstream bad("XXXX0000000000000000");
  CHECK_THROWS_AS(read_snapshot(bad), std::runtime_error);

  auto g = TorusGrid::make(2, 8);
  std::stringstream ss;
  write_snapshot(ss, random_modes(g, 4, 2));
  std::string s = ss.str();
  std::stringstream truncated(s.substr(0, s.size() - 8));
  CHECK_THROWS_AS(read_snapshot(truncated), std::runtime_error);

  std::string wrong_version = s;
  wrong_version[4] = 9;
  std::stringstream wv(wrong_version);
  CHECK_THROWS_AS(read_snapshot(wv), std::runtime_error);
}

TEST_CASE("sup norm reports non-finite samples as infinite") {
  auto g = TorusGrid::make(2, 8);
  RealField f(g);
  f[5] = std::numeric_limits<double>::quiet_NaN();
  CHECK(std::isinf(sup_norm(f)));
  kernels::ScopedExecution mode(kernels::Execution::serial);
  CHECK(std::isinf(sup_norm(f)));
}
