#include "torusns/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace torusns {
namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

constexpr double kPi = std::numbers::pi;
constexpr int kMaxRadius = 100000;

void check_args(std::span<const double> x, double t) {
  if (x.empty() || x.size() > 3) throw std::invalid_argument("heat kernel: dimension must be 1..3");
  if (!(t > 0.0)) throw std::invalid_argument("heat kernel: t must be > 0 (got " + std::to_string(t) + ")");
}

double reduce(double x) { return x - 2.0 * kPi * std::round(x / (2.0 * kPi)); }

// Largest Poisson term on one axis; theta(x,t) is at least the product of these
// times the prefactor since every image term is positive.
double poisson_leading(double xr, double t) { return std::exp(-xr * xr / (4.0 * t)); }

double prefactor(int n, double t) { return std::pow(kPi / t, 0.5 * n); }

double theta_lower_bound(std::span<const double> x, double t) {
  double v = prefactor(static_cast<int>(x.size()), t);
  for (double xi : x) v *= poisson_leading(reduce(xi), t);
  return v;
}

// sum_{|m|>R} exp(-m^2 t)
double spectral_tail_1d(int R, double t) {
  double r1 = R + 1.0;
  return 2.0 * std::exp(-r1 * r1 * t) / (1.0 - std::exp(-(2.0 * R + 3.0) * t));
}

// sum_{|m|<=R} exp(-m^2 t)
double spectral_abs_1d(int R, double t) {
  double s = 1.0;
  for (int m = 1; m <= R; ++m) s += 2.0 * std::exp(-static_cast<double>(m) * m * t);
  return s;
}

// prod_d (g_d + tau) - prod_d g_d, expanded over nonempty axis subsets so tiny
// tails do not cancel away.
double product_increment(const double* g, int n, double tau) {
  double total = 0.0;
  for (int mask = 1; mask < (1 << n); ++mask) {
    double term = 1.0;
    for (int d = 0; d < n; ++d) term *= (mask >> d) & 1 ? tau : g[d];
    total += term;
  }
  return total;
}

double spectral_tail(int n, int R, double t) {
  double a[3];
  for (int d = 0; d < n; ++d) a[d] = spectral_abs_1d(R, t);
  return product_increment(a, n, spectral_tail_1d(R, t));
}

// sum over |m| > R of exp(-|x + 2 pi m|^2 / 4t) for |x| <= pi.
double poisson_tail_1d(int R, double t) {
  double lead = kPi * (2.0 * R + 1.0);
  return 2.0 * std::exp(-lead * lead / (4.0 * t)) / (1.0 - std::exp(-2.0 * kPi * kPi * (R + 1.0) / t));
}

double poisson_axis(double xr, double t, int R) {
  double s = 0.0;
  for (int m = -R; m <= R; ++m) {
    double y = xr + 2.0 * kPi * m;
    s += std::exp(-y * y / (4.0 * t));
  }
  return s;
}

double poisson_tail(std::span<const double> x, double t, int R) {
  const int n = static_cast<int>(x.size());
  double g[3];
  for (int d = 0; d < n; ++d) g[d] = poisson_axis(reduce(x[d]), t, R);
  return prefactor(n, t) * product_increment(g, n, poisson_tail_1d(R, t));
}

// 1 + 2 sum_{m=1}^R exp(-m^2 t) cos(m x) in quad precision. The Gaussian
// factors come from q^{m^2} = q^{(m-1)^2} q^{2m-1} and the cosines from
// repeated rotation, so only three transcendental calls are made per axis.
Quad spectral_axis(double xr, double t, int R) {
  Quad q = boost::multiprecision::exp(Quad(-t));
  Quad q2 = q * q;
  Quad step = q;
  Quad gauss = 1;
  Quad c1 = boost::multiprecision::cos(Quad(xr));
  Quad s1 = boost::multiprecision::sin(Quad(xr));
  Quad c = 1;
  Quad s = 0;
  Quad sum = 1;
  for (int m = 1; m <= R; ++m) {
    gauss *= step;
    step *= q2;
    Quad cn = c * c1 - s * s1;
    s = s * c1 + c * s1;
    c = cn;
    sum += 2 * gauss * c;
  }
  return sum;
}

}  // namespace

KernelRepresentation parse_kernel_representation(std::string_view name) {
  if (name == "spectral") return KernelRepresentation::spectral;
  if (name == "poisson") return KernelRepresentation::poisson;
  if (name == "auto" || name == "automatic") return KernelRepresentation::automatic;
  throw std::invalid_argument("unknown kernel representation: " + std::string(name));
}

std::string_view to_string(KernelRepresentation r) {
  switch (r) {
    case KernelRepresentation::spectral: return "spectral";
    case KernelRepresentation::poisson: return "poisson";
    case KernelRepresentation::automatic: return "auto";
  }
  return "?";
}

void KernelEvalConfig::validate() const {
  if (truncation_radius < 1) throw std::invalid_argument("KernelEvalConfig: truncation_radius must be >= 1");
  if (!(crossover_time > 0.0)) throw std::invalid_argument("KernelEvalConfig: crossover_time must be > 0");
  if (!(tail_tolerance > 0.0)) throw std::invalid_argument("KernelEvalConfig: tail_tolerance must be > 0");
}

int spectral_radius_for(std::span<const double> x, double t, double tolerance, bool relative) {
  check_args(x, t);
  const int n = static_cast<int>(x.size());
  const double target = relative ? tolerance * theta_lower_bound(x, t) : tolerance;
  for (int R = 1; R < kMaxRadius; ++R) {
    if (spectral_tail(n, R, t) < target) return R;
  }
  return kMaxRadius;
}

int poisson_radius_for(std::span<const double> x, double t, double tolerance, bool relative) {
  check_args(x, t);
  const double target = relative ? tolerance * theta_lower_bound(x, t) : tolerance;
  for (int R = 1; R < kMaxRadius; ++R) {
    if (poisson_tail(x, t, R) < target) return R;
  }
  return kMaxRadius;
}

KernelValue heat_kernel_spectral(std::span<const double> x, double t, const KernelEvalConfig& cfg) {
  check_args(x, t);
  cfg.validate();
  int R = cfg.truncation_radius;
  if (cfg.representation == KernelRepresentation::automatic) {
    R = std::max(R, spectral_radius_for(x, t, cfg.tail_tolerance, false));
  }
  Quad v = 1;
  for (double xi : x) v *= spectral_axis(reduce(xi), t, R);
  KernelValue out;
  out.value = static_cast<double>(v);
  out.tail_bound = spectral_tail(static_cast<int>(x.size()), R, t);
  out.radius = R;
  out.representation = KernelRepresentation::spectral;
  return out;
}

KernelValue heat_kernel_poisson(std::span<const double> x, double t, const KernelEvalConfig& cfg) {
  check_args(x, t);
  cfg.validate();
  int R = cfg.truncation_radius;
  if (cfg.representation == KernelRepresentation::automatic) {
    R = std::max(R, poisson_radius_for(x, t, cfg.tail_tolerance, false));
  }
  double v = prefactor(static_cast<int>(x.size()), t);
  for (double xi : x) v *= poisson_axis(reduce(xi), t, R);
  KernelValue out;
  out.value = v;
  out.tail_bound = poisson_tail(x, t, R);
  out.radius = R;
  out.representation = KernelRepresentation::poisson;
  return out;
}

KernelValue heat_kernel(std::span<const double> x, double t, const KernelEvalConfig& cfg) {
  switch (cfg.representation) {
    case KernelRepresentation::spectral: return heat_kernel_spectral(x, t, cfg);
    case KernelRepresentation::poisson: return heat_kernel_poisson(x, t, cfg);
    case KernelRepresentation::automatic:
      return t < cfg.crossover_time ? heat_kernel_poisson(x, t, cfg) : heat_kernel_spectral(x, t, cfg);
  }
  throw std::logic_error("heat_kernel: bad representation");
}

}  // namespace torusns
