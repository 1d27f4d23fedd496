#pragma once

#include <span>
#include <string_view>

namespace torusns {

enum class KernelRepresentation { spectral, poisson, automatic };

KernelRepresentation parse_kernel_representation(std::string_view name);
std::string_view to_string(KernelRepresentation r);

struct KernelEvalConfig {
  /// Lattice cutoff |k|_inf <= R. Used as-is for an explicit representation;
  /// in automatic mode it is a lower bound and grows until the tail bound
  /// drops below `tail_tolerance`.
  int truncation_radius = 1;
  KernelRepresentation representation = KernelRepresentation::automatic;
  /// Automatic mode: image (Poisson) sum below this time, Fourier sum at or above.
  double crossover_time = 0.5;
  double tail_tolerance = 1e-14;

  /// Throws std::invalid_argument on truncation_radius < 1 or crossover_time <= 0.
  void validate() const;
};

struct KernelValue {
  double value = 0.0;
  /// Bound on the absolute size of all omitted lattice terms.
  double tail_bound = 0.0;
  int radius = 0;
  KernelRepresentation representation = KernelRepresentation::spectral;
};

/// theta(x, t) = sum_k exp(-|k|^2 t) exp(i k.x), dimension = x.size() in 1..3.
/// The truncated cube sum factorizes over axes; each axis factor is summed in
/// quad precision because the cosine series cancels heavily for small t.
KernelValue heat_kernel_spectral(std::span<const double> x, double t, const KernelEvalConfig& cfg);

/// theta(x, t) = (pi/t)^{n/2} sum_k exp(-|x + 2 pi k|^2 / (4t)).
KernelValue heat_kernel_poisson(std::span<const double> x, double t, const KernelEvalConfig& cfg);

/// Dispatches on cfg.representation (automatic: crossover rule).
KernelValue heat_kernel(std::span<const double> x, double t, const KernelEvalConfig& cfg);

/// Smallest radius whose tail bound is below `tolerance`. With `relative` the
/// target is tolerance times a lower bound on theta(x, t).
int spectral_radius_for(std::span<const double> x, double t, double tolerance, bool relative);
int poisson_radius_for(std::span<const double> x, double t, double tolerance, bool relative);

}  // namespace torusns
