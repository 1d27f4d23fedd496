#pragma once

// Declarative experiment configuration and the runner behind the command line.
// A config is a JSON document (comments allowed) overlaid on default_config();
// every key must already exist in the defaults.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "torusns/estimates.hpp"
#include "torusns/initial_data.hpp"
#include "torusns/solver.hpp"

namespace torusns::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;

/// Configuration problem tied to one dotted key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class ExperimentKind {
  simulate,
  g_system,
  verify_kernel,
  verify_semigroup,
  verify_estimates,
  scaling_check,
  picard_crosscheck,
};

ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind kind);

/// Every accepted key with its default value. A null default marks an
/// optional number or path.
nlohmann::json default_config();

/// Parses text as JSON with comments. Throws ConfigError on syntax errors.
nlohmann::json parse_config_text(const std::string& text);

/// "a.b.c=value": value is parsed as JSON, falling back to a plain string.
/// Throws ConfigError for a missing '=' or a key absent from the defaults.
void apply_override(nlohmann::json& doc, const std::string& assignment);

struct PicardSettings {
  double time = 0.01;
  int iterations = 8;
  int nodes = 8;
  /// Step of the reference simulation.
  double dt = 1e-4;
  double tolerance = 1e-8;
  /// Snapshot cadences (steps between stored samples), coarse to fine.
  std::vector<int> cadences{16, 8, 4};
  double duhamel_dt = 1.25e-4;
  /// Smallest accepted log2 ratio between successive residuals.
  double min_order = 3.5;
};

struct GSystemSettings {
  /// Multiplies every coefficient of the Navier-Stokes encoding.
  double coefficient_scale = 1.0;
  double match_tolerance = 1e-9;
  /// Constant of the forced heat bound; empty: from constants_file, else measured.
  std::optional<double> C;
};

struct FutureControlSettings {
  /// Empty: skip the check.
  std::optional<double> t1;
  std::vector<int> orders{0, 1, 2};
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::simulate;
  /// Defaults overlaid with the file and overrides.
  nlohmann::json resolved;
  /// FNV-1a of the resolved config without output_dir and threads.
  std::string hash;
  std::filesystem::path output_dir;
  /// 0: all available cores.
  int threads = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> amplitudes;

  SolverConfig solver;
  InitialSpec initial;

  KernelDualityConfig kernel;
  double kernel_tolerance = 1e-10;
  int beta_nodes = 8;

  TrialFamily semigroup_family;
  int semigroup_j_max = 4;
  int semigroup_trials = 200;
  std::vector<double> semigroup_t;
  double semigroup_slack = 1e-12;
  double semigroup_stability = 0.05;

  ForcingFamily forcing_family;
  int forcing_trials = 50;
  double forcing_end_time = 10.0;

  TheoremBoundsConfig theorem;
  /// estimates.C if given.
  std::optional<double> theorem_C;
  std::optional<std::filesystem::path> constants_file;
  /// Parsed constants block of constants_file.
  std::optional<nlohmann::json> constants;

  ScalingCheckConfig scaling;
  double scaling_tolerance = 1e-6;
  FutureControlSettings future;

  GSystemSettings g_system;
  PicardSettings picard;
};

/// Overlays `doc` on the defaults and validates every field. Throws ConfigError.
ExperimentConfig load_config(const nlohmann::json& doc);

/// Reads, overrides and validates. Throws ConfigError (including for an unreadable file).
ExperimentConfig load_config_file(const std::filesystem::path& path, const std::vector<std::string>& overrides);

/// Plan, memory and step estimates without running anything.
std::string describe(const ExperimentConfig& cfg);

struct RunResult {
  int exit_code = kExitPass;
  EstimateReport report;
  std::vector<std::filesystem::path> artifacts;
  /// Set on numerical failure.
  std::string failure;
};

/// Runs the experiment and writes artifacts under cfg.output_dir. `log` gets
/// progress lines and the one-screen summary.
RunResult run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace torusns::cli
