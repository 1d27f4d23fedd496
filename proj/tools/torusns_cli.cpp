// Command-line entry point: `run` executes an experiment config, `describe`
// prints its plan. Exit codes: 0 pass, 1 numerical failure, 2 config error.

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "experiment.hpp"

namespace cli = torusns::cli;

namespace {

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  std::string output_dir;
  bool deterministic = false;
  std::string constants;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("config", o.config, "Experiment config (JSON, comments allowed)")->required();
  sub->add_option("--set", o.overrides, "Dotted override key=value (repeatable)")->allow_extra_args(false);
  sub->add_option("--output-dir", o.output_dir, "Directory for reports and snapshots");
  sub->add_flag("--deterministic", o.deterministic, "Run every kernel on one thread");
}

// Flags map onto ordinary overrides so they go through the same validation.
cli::ExperimentConfig load(const Options& o) {
  auto overrides = o.overrides;
  if (!o.output_dir.empty()) overrides.push_back("output_dir=\"" + o.output_dir + "\"");
  if (o.deterministic) overrides.push_back("threads=1");
  if (!o.constants.empty()) overrides.push_back("estimates.constants_file=\"" + o.constants + "\"");
  return cli::load_config_file(o.config, overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral Navier-Stokes estimates on the periodic torus"};
  app.require_subcommand(1);

  Options run_opts, describe_opts;
  auto* run = app.add_subcommand("run", "Run an experiment and write its report");
  add_common(run, run_opts);
  run->add_option("--constants", run_opts.constants, "Constants file from a verify-semigroup report");
  auto* desc = app.add_subcommand("describe", "Print the resolved config and plan without running");
  add_common(desc, describe_opts);
  desc->add_option("--constants", describe_opts.constants, "Constants file used for the window warning");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }

  const bool running = run->parsed();
  const Options& o = running ? run_opts : describe_opts;
  cli::ExperimentConfig cfg;
  try {
    cfg = load(o);
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitConfig;
  }

  if (!running) {
    std::cout << cli::describe(cfg);
    return cli::kExitPass;
  }
  try {
    auto result = cli::run_experiment(cfg, std::cout);
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitNumerical;
  }
}
