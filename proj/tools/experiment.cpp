#include "experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "torusns/gspec.hpp"
#include "torusns/kernels.hpp"
#include "torusns/picard.hpp"
#include "torusns/snapshot.hpp"
#include "torusns/spectral.hpp"

namespace torusns::cli {

using nlohmann::json;

namespace {

constexpr const char* kDefaults = R"({
  "experiment": "simulate",
  "output_dir": "out",
  "threads": 0,
  "seeds": [1, 2, 3],
  "amplitudes": [0.5, 1.0, 2.0, 4.0],
  "grid": {"dim": 3, "modes": 32},
  "solver": {
    "dt": null, "order": 4, "end_time": 1.0, "dealias": true, "blowup_threshold": null,
    "snapshot_every": 0, "diagnostics_every": 1, "j_max": 3, "form": "advective"
  },
  "initial": {"kind": "taylor_green", "seed": 1, "max_wavenumber": 4, "amplitude": 1.0},
  "kernel": {
    "x_points": 20, "t_points": 20, "t_min": 0.05, "t_max": 5.0, "dims": [1, 2, 3],
    "tail_tolerance": 1e-13, "tolerance": 1e-10, "beta_nodes": 8
  },
  "semigroup": {
    "j_max": 4, "trials": 200, "t_min": 0.01, "t_max": 10.0, "t_points": 12,
    "max_wavenumber": 2, "base_seed": 1, "slack": 1e-12, "stability": 0.05
  },
  "forcing": {"trials": 50, "end_time": 10.0, "max_wavenumber": 2, "t_points": 16, "base_seed": 1},
  "estimates": {
    "family": "scaling_orbit", "max_wavenumber": 1, "j_max": 3, "steps": 256, "diagnostics_every": 4,
    "collapse_factor": 2.0, "k0_bound": 2.0, "heat_control": true, "C": null, "constants_file": null
  },
  "scaling": {
    "lambda": 2, "j_max": 2, "pressure": true, "tolerance": 1e-6,
    "future_t1": null, "future_orders": [0, 1, 2]
  },
  "g_system": {"coefficient_scale": 1.0, "match_tolerance": 1e-9, "C": null},
  "picard": {
    "time": 0.01, "iterations": 8, "nodes": 8, "dt": 1e-4, "tolerance": 1e-8,
    "cadences": [16, 8, 4], "duhamel_dt": 1.25e-4, "min_order": 3.5
  }
})";

// Overlay `src` on `dst`, rejecting keys the defaults do not have and values
// whose JSON type differs from the default's.
void overlay(json& dst, const json& src, const std::string& prefix) {
  if (!src.is_object()) throw ConfigError(prefix, "expected an object");
  for (auto it = src.begin(); it != src.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!dst.contains(it.key())) throw ConfigError(key, "unknown key");
    json& slot = dst[it.key()];
    const json& v = it.value();
    if (slot.is_object()) {
      overlay(slot, v, key);
      continue;
    }
    bool ok = slot.is_null() ? (v.is_null() || v.is_number() || v.is_string())
              : slot.is_number() ? v.is_number()
              : slot.is_boolean() ? v.is_boolean()
              : slot.is_string() ? v.is_string()
              : slot.is_array() ? v.is_array()
                                : false;
    if (!ok) throw ConfigError(key, "wrong type (got " + std::string(v.type_name()) + ")");
    slot = v;
  }
}

const json& at(const json& root, const std::string& dotted) {
  const json* node = &root;
  std::size_t start = 0;
  while (true) {
    auto dot = dotted.find('.', start);
    std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) throw ConfigError(dotted, "unknown key");
    node = &(*node)[part];
    if (dot == std::string::npos) return *node;
    start = dot + 1;
  }
}

double num(const json& r, const std::string& key) {
  const auto& v = at(r, key);
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(key, "must be finite");
  return d;
}

std::optional<double> opt_num(const json& r, const std::string& key) {
  const auto& v = at(r, key);
  if (v.is_null()) return std::nullopt;
  return num(r, key);
}

long long integer(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::isfinite(d) && std::round(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  throw ConfigError(key, "expected an integer");
}

int int_at(const json& r, const std::string& key) {
  long long v = integer(at(r, key), key);
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError(key, "out of range");
  return static_cast<int>(v);
}

int positive(const json& r, const std::string& key, int min = 1) {
  int v = int_at(r, key);
  if (v < min) throw ConfigError(key, "must be >= " + std::to_string(min));
  return v;
}

double positive_num(const json& r, const std::string& key) {
  double v = num(r, key);
  if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
  return v;
}

bool flag(const json& r, const std::string& key) {
  const auto& v = at(r, key);
  if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
  return v.get<bool>();
}

std::string str(const json& r, const std::string& key) {
  const auto& v = at(r, key);
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> num_list(const json& r, const std::string& key) {
  std::vector<double> out;
  for (const auto& v : at(r, key)) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw ConfigError(key, "expected finite numbers");
    out.push_back(v.get<double>());
  }
  if (out.empty()) throw ConfigError(key, "must be non-empty");
  return out;
}

std::vector<int> int_list(const json& r, const std::string& key) {
  std::vector<int> out;
  for (const auto& v : at(r, key)) out.push_back(static_cast<int>(integer(v, key)));
  if (out.empty()) throw ConfigError(key, "must be non-empty");
  return out;
}

// Runs a library validate() and re-labels its complaint with the config section.
template <class Fn>
void checked(const std::string& key, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "simulate") return ExperimentKind::simulate;
  if (name == "g-system") return ExperimentKind::g_system;
  if (name == "verify-kernel") return ExperimentKind::verify_kernel;
  if (name == "verify-semigroup") return ExperimentKind::verify_semigroup;
  if (name == "verify-estimates") return ExperimentKind::verify_estimates;
  if (name == "scaling-check") return ExperimentKind::scaling_check;
  if (name == "picard-crosscheck") return ExperimentKind::picard_crosscheck;
  throw ConfigError("experiment", "unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::g_system: return "g-system";
    case ExperimentKind::verify_kernel: return "verify-kernel";
    case ExperimentKind::verify_semigroup: return "verify-semigroup";
    case ExperimentKind::verify_estimates: return "verify-estimates";
    case ExperimentKind::scaling_check: return "scaling-check";
    case ExperimentKind::picard_crosscheck: return "picard-crosscheck";
  }
  return "?";
}

json default_config() { return json::parse(kDefaults); }

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
}

void apply_override(json& doc, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  at(default_config(), key);  // the key must exist in the defaults

  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  if (!doc.is_object()) throw ConfigError("", "config root must be an object");
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    auto dot = key.find('.', start);
    std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    json& child = (*node)[part];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) throw ConfigError(key.substr(0, dot), "expected an object");
    node = &child;
    start = dot + 1;
  }
}

ExperimentConfig load_config(const json& doc) {
  json r = default_config();
  overlay(r, doc, "");

  ExperimentConfig c;
  c.resolved = r;
  c.kind = parse_experiment_kind(str(r, "experiment"));
  c.output_dir = str(r, "output_dir");
  if (c.output_dir.empty()) throw ConfigError("output_dir", "must be non-empty");
  c.threads = int_at(r, "threads");
  if (c.threads < 0) throw ConfigError("threads", "must be >= 0");
  for (double s : num_list(r, "seeds")) {
    if (s < 0 || std::round(s) != s) throw ConfigError("seeds", "seeds must be non-negative integers");
    c.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  c.amplitudes = num_list(r, "amplitudes");
  for (double a : c.amplitudes) {
    if (!(a > 0.0)) throw ConfigError("amplitudes", "amplitudes must be > 0");
  }

  // Solver and grid.
  auto& s = c.solver;
  s.dim = int_at(r, "grid.dim");
  if (s.dim < 2 || s.dim > 3) throw ConfigError("grid.dim", "must be 2 or 3");
  s.modes = int_at(r, "grid.modes");
  if (s.modes < 4 || s.modes % 2) throw ConfigError("grid.modes", "must be even and >= 4");
  s.dt = opt_num(r, "solver.dt");
  if (s.dt && !(*s.dt > 0.0)) throw ConfigError("solver.dt", "must be > 0");
  s.order = int_at(r, "solver.order");
  if (s.order != 1 && s.order != 2 && s.order != 4) throw ConfigError("solver.order", "must be 1, 2 or 4");
  s.end_time = positive_num(r, "solver.end_time");
  s.dealias = flag(r, "solver.dealias");
  s.blowup_threshold = opt_num(r, "solver.blowup_threshold");
  if (s.blowup_threshold && !(*s.blowup_threshold > 0.0)) throw ConfigError("solver.blowup_threshold", "must be > 0");
  s.snapshot_every = positive(r, "solver.snapshot_every", 0);
  s.diagnostics_every = positive(r, "solver.diagnostics_every", 0);
  s.j_max = positive(r, "solver.j_max", 0);
  const auto form = str(r, "solver.form");
  if (form == "advective") {
    s.form = NonlinearForm::advective;
  } else if (form == "divergence") {
    s.form = NonlinearForm::divergence;
  } else {
    throw ConfigError("solver.form", "must be 'advective' or 'divergence'");
  }
  checked("solver", [&] { s.validate(); });

  const auto kind = str(r, "initial.kind");
  if (kind == "taylor_green") {
    c.initial.kind = InitialKind::taylor_green;
  } else if (kind == "random") {
    c.initial.kind = InitialKind::random_bandlimited;
  } else {
    throw ConfigError("initial.kind", "must be 'taylor_green' or 'random'");
  }
  c.initial.seed = static_cast<std::uint64_t>(positive(r, "initial.seed", 0));
  c.initial.max_wavenumber = positive(r, "initial.max_wavenumber");
  c.initial.amplitude = positive_num(r, "initial.amplitude");
  if (c.initial.kind == InitialKind::random_bandlimited && 2 * c.initial.max_wavenumber >= s.modes) {
    throw ConfigError("initial.max_wavenumber", "must be below modes/2");
  }

  // Kernel duality.
  c.kernel.x_points = positive(r, "kernel.x_points");
  c.kernel.t_points = positive(r, "kernel.t_points", 2);
  c.kernel.t_min = positive_num(r, "kernel.t_min");
  c.kernel.t_max = positive_num(r, "kernel.t_max");
  c.kernel.dims = int_list(r, "kernel.dims");
  c.kernel.tail_tolerance = positive_num(r, "kernel.tail_tolerance");
  c.kernel_tolerance = positive_num(r, "kernel.tolerance");
  c.beta_nodes = positive(r, "kernel.beta_nodes");
  checked("kernel", [&] { c.kernel.validate(); });

  // Semigroup constants.
  c.semigroup_family.dim = s.dim;
  c.semigroup_family.modes = s.modes;
  c.semigroup_family.max_wavenumber = positive(r, "semigroup.max_wavenumber");
  c.semigroup_family.base_seed = static_cast<std::uint64_t>(positive(r, "semigroup.base_seed", 0));
  c.semigroup_j_max = positive(r, "semigroup.j_max");
  c.semigroup_trials = positive(r, "semigroup.trials", 2);
  const bool measures = c.kind == ExperimentKind::verify_semigroup || c.kind == ExperimentKind::verify_estimates;
  checked("semigroup", [&] {
    if (measures) c.semigroup_family.validate();
    c.semigroup_t = geometric_grid(positive_num(r, "semigroup.t_min"), positive_num(r, "semigroup.t_max"),
                                   positive(r, "semigroup.t_points"));
  });
  c.semigroup_slack = num(r, "semigroup.slack");
  c.semigroup_stability = positive_num(r, "semigroup.stability");

  c.forcing_family.modes = s.modes;
  c.forcing_family.max_wavenumber = positive(r, "forcing.max_wavenumber");
  c.forcing_family.t_points = positive(r, "forcing.t_points", 2);
  c.forcing_family.base_seed = static_cast<std::uint64_t>(positive(r, "forcing.base_seed", 0));
  c.forcing_trials = positive(r, "forcing.trials");
  c.forcing_end_time = positive_num(r, "forcing.end_time");
  if (measures || c.kind == ExperimentKind::g_system) checked("forcing", [&] { c.forcing_family.validate(); });

  // Solution bounds.
  auto& t = c.theorem;
  t.amplitudes = c.amplitudes;
  t.seeds = c.seeds;
  t.dim = s.dim;
  t.modes = s.modes;
  checked("estimates.family", [&] { t.family = parse_collapse_family(str(r, "estimates.family")); });
  t.max_wavenumber = positive(r, "estimates.max_wavenumber");
  t.j_max = positive(r, "estimates.j_max");
  t.steps = positive(r, "estimates.steps");
  t.diagnostics_every = positive(r, "estimates.diagnostics_every");
  t.collapse_factor = positive_num(r, "estimates.collapse_factor");
  t.k0_bound = positive_num(r, "estimates.k0_bound");
  t.heat_control = flag(r, "estimates.heat_control");
  c.theorem_C = opt_num(r, "estimates.C");
  if (c.theorem_C && !(*c.theorem_C > 0.0)) throw ConfigError("estimates.C", "must be > 0");
  if (c.theorem_C) t.C = *c.theorem_C;
  // Checks that tie a section to the grid only apply to the experiment that uses it.
  if (c.kind == ExperimentKind::verify_estimates) checked("estimates", [&] { t.validate(); });

  const auto& cf = at(r, "estimates.constants_file");
  if (!cf.is_null()) {
    if (!cf.is_string()) throw ConfigError("estimates.constants_file", "expected a path");
    c.constants_file = cf.get<std::string>();
    std::ifstream in(*c.constants_file);
    if (!in) throw ConfigError("estimates.constants_file", "cannot read " + c.constants_file->string());
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
      j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ConfigError("estimates.constants_file", std::string("malformed JSON: ") + e.what());
    }
    json block = j.contains("constants") ? j["constants"] : j;
    if (!block.is_object() || !block.contains("C") || !block["C"].is_number() || !(block["C"].get<double>() > 0.0)) {
      throw ConfigError("estimates.constants_file", "needs a positive constants.C");
    }
    c.constants = block;
  }

  // Scaling and future control.
  c.scaling.lambda = num(r, "scaling.lambda");
  c.scaling.j_max = positive(r, "scaling.j_max", 0);
  c.scaling.pressure = flag(r, "scaling.pressure");
  c.scaling.base = s;
  c.scaling_tolerance = positive_num(r, "scaling.tolerance");
  checked("scaling.lambda", [&] { c.scaling.validate(); });
  c.future.t1 = opt_num(r, "scaling.future_t1");
  c.future.orders = int_list(r, "scaling.future_orders");
  for (int j : c.future.orders) {
    if (c.kind != ExperimentKind::scaling_check || !c.future.t1) break;
    if (j < 0 || j > s.j_max) throw ConfigError("scaling.future_orders", "orders must lie in 0..solver.j_max");
  }

  c.g_system.coefficient_scale = num(r, "g_system.coefficient_scale");
  c.g_system.match_tolerance = positive_num(r, "g_system.match_tolerance");
  c.g_system.C = opt_num(r, "g_system.C");
  if (c.g_system.C && !(*c.g_system.C > 0.0)) throw ConfigError("g_system.C", "must be > 0");
  if (c.g_system.coefficient_scale == 0.0) throw ConfigError("g_system.coefficient_scale", "must be nonzero");

  auto& p = c.picard;
  p.time = positive_num(r, "picard.time");
  p.iterations = positive(r, "picard.iterations");
  p.nodes = positive(r, "picard.nodes", 2);
  p.dt = positive_num(r, "picard.dt");
  p.tolerance = positive_num(r, "picard.tolerance");
  p.cadences = int_list(r, "picard.cadences");
  if (p.cadences.size() < 2) throw ConfigError("picard.cadences", "need at least two cadences");
  for (int k : p.cadences) {
    if (k < 1) throw ConfigError("picard.cadences", "cadences must be >= 1");
  }
  p.duhamel_dt = positive_num(r, "picard.duhamel_dt");
  p.min_order = num(r, "picard.min_order");

  // Initial data must be constructible on the grid before anything runs.
  checked("initial", [&] { make_initial_field(s.grid(), c.initial); });
  if (c.kind == ExperimentKind::picard_crosscheck) {
    const double a = c.initial.amplitude;
    if (p.time * a * a > 0.1) throw ConfigError("picard.time", "must satisfy time * amplitude^2 <= 0.1");
  }

  json h = r;
  h.erase("output_dir");
  h.erase("threads");
  c.hash = fnv1a_hex(h.dump());
  return c;
}

ExperimentConfig load_config_file(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc = parse_config_text(buf.str());
  if (!doc.is_object()) throw ConfigError("", "config root must be an object");
  for (const auto& o : overrides) apply_override(doc, o);
  return load_config(doc);
}

// ---------------------------------------------------------------------------

namespace {

std::string bytes_text(double bytes) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  if (bytes >= 1024.0 * 1024.0 * 1024.0) {
    os << bytes / (1024.0 * 1024.0 * 1024.0) << " GiB";
  } else {
    os << bytes / (1024.0 * 1024.0) << " MiB";
  }
  return os.str();
}

long step_count(double end_time, double dt) {
  return std::max(1L, static_cast<long>(std::ceil(end_time / dt - 1e-9)));
}

double resolved_dt(const ExperimentConfig& c, const SpectralVector& f) {
  return c.solver.dt ? *c.solver.dt : default_time_step(f, c.solver.dealias);
}

// Spectral fields alive during a Lawson RK4 step: state, four stages, two work
// copies, one per component.
int stepping_fields(int dim) { return 7 * dim; }

}  // namespace

std::string describe(const ExperimentConfig& c) {
  std::ostringstream os;
  const auto grid = c.solver.grid();
  const auto f = make_initial_field(grid, c.initial);
  os << "experiment: " << to_string(c.kind) << '\n';
  os << "config hash: " << c.hash << '\n';
  os << "output directory: " << c.output_dir.string() << '\n';
  os << "resolved configuration:\n" << c.resolved.dump(2) << '\n';
  os << "plan:\n";

  double points = std::pow(static_cast<double>(c.solver.modes), c.solver.dim);
  int fields = stepping_fields(c.solver.dim);
  switch (c.kind) {
    case ExperimentKind::simulate:
    case ExperimentKind::g_system: {
      double dt = resolved_dt(c, f);
      os << "  1 simulation, " << step_count(c.solver.end_time, dt) << " steps of dt = " << dt << " to T = "
         << c.solver.end_time << '\n';
      if (c.kind == ExperimentKind::g_system) {
        os << "  plus a Navier-Stokes reference run and a window run to c0 / |f|^2\n";
      }
      break;
    }
    case ExperimentKind::verify_kernel:
      os << "  " << c.kernel.x_points << " x " << c.kernel.t_points << " (x, t) points for each of "
         << c.kernel.dims.size() << " dimensions\n";
      fields = 0;
      break;
    case ExperimentKind::verify_semigroup:
      os << "  " << c.semigroup_trials << " trial fields x " << c.semigroup_t.size() << " times, j <= "
         << c.semigroup_j_max << ", plain and projected\n";
      os << "  " << c.forcing_trials << " forcing trials for the forced heat bound\n";
      fields = 4 * c.solver.dim;
      break;
    case ExperimentKind::verify_estimates: {
      const auto runs = c.theorem.amplitudes.size() * c.theorem.seeds.size();
      os << "  " << c.theorem.amplitudes.size() << " amplitudes x " << c.theorem.seeds.size() << " seeds = " << runs
         << " simulations of " << c.theorem.steps << " steps each\n";
      if (c.theorem.heat_control) os << "  plus " << runs << " heat-only control runs\n";
      if (!c.theorem_C && !c.constants) os << "  C measured first (semigroup and forcing trials)\n";
      break;
    }
    case ExperimentKind::scaling_check: {
      double dt = resolved_dt(c, f);
      const int lambda = static_cast<int>(c.scaling.lambda);
      os << "  2 simulations of " << step_count(c.solver.end_time, dt) << " steps: M = " << c.solver.modes
         << " and M = " << c.solver.modes * lambda << '\n';
      points = std::pow(static_cast<double>(c.solver.modes * lambda), c.solver.dim);
      break;
    }
    case ExperimentKind::picard_crosscheck:
      os << "  Picard: " << c.picard.iterations << " iterations on " << c.picard.nodes << " nodes to t = "
         << c.picard.time << '\n';
      os << "  reference simulation: " << step_count(c.picard.time, c.picard.dt) << " steps\n";
      os << "  Duhamel residual at " << c.picard.cadences.size() << " cadences, "
         << step_count(c.picard.time, c.picard.duhamel_dt) << " steps each\n";
      fields = c.solver.dim * (c.picard.nodes + 4);
      break;
  }
  if (fields > 0) {
    os << "memory estimate: " << bytes_text(points * 16.0 * fields) << " (" << static_cast<long long>(points)
       << " complex values x 16 bytes x " << fields << " fields)\n";
  }

  if (c.kind == ExperimentKind::simulate || c.kind == ExperimentKind::g_system) {
    if (c.constants && c.constants->contains("c0")) {
      const double c0 = (*c.constants)["c0"].get<double>();
      const double a = sup_norm(f);
      const double window = c0 / (a * a);
      if (c.solver.end_time > window) {
        os << "warning: end_time " << c.solver.end_time << " exceeds the a priori window c0 / |f|^2 = " << window
           << " (c0 = " << c0 << " from " << c.constants_file->string() << ")\n";
      } else {
        os << "end_time lies inside the a priori window c0 / |f|^2 = " << window << '\n';
      }
    } else {
      os << "no constants file: a priori window not checked\n";
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

struct Context {
  const ExperimentConfig& cfg;
  std::ostream& log;
  RunResult& result;

  std::filesystem::path file(const std::string& name) {
    auto p = cfg.output_dir / name;
    result.artifacts.push_back(p);
    return p;
  }
};

void write_trajectory(Context& ctx, const Trajectory& traj, const std::string& stem) {
  {
    std::ofstream os(ctx.file(stem + "_trace.csv"));
    write_trace_csv(os, traj);
  }
  auto list = json::array();
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    std::ostringstream name;
    name << stem << "_" << std::setw(4) << std::setfill('0') << i << ".pfld";
    write_snapshot(ctx.file(name.str()), traj.samples[i].u);
    list.push_back({{"file", name.str()}, {"t", traj.samples[i].t}});
  }
  ctx.result.report.traces[stem] = {{"dt", traj.dt},
                                    {"samples", list},
                                    {"terminated_early", traj.terminated_early},
                                    {"termination_reason", traj.termination_reason},
                                    {"termination_time", traj.termination_time},
                                    {"max_sup", traj.max_sup}};
}

void add_run_verdicts(Context& ctx, const Trajectory& traj, const std::string& stem) {
  auto& rep = ctx.result.report;
  rep.verdicts.push_back(make_verdict(stem + "_completed", traj.terminated_early ? 1.0 : 0.0, "==", 0.0, stem));
  if (traj.terminated_early) ctx.result.failure = traj.termination_reason;
}

SemigroupConstants run_semigroup(Context& ctx) {
  const auto& c = ctx.cfg;
  ctx.log << "measuring semigroup constants: " << c.semigroup_trials << " trials\n";
  auto r = measure_semigroup_constants(c.semigroup_family, c.semigroup_j_max, c.semigroup_trials, c.semigroup_t);
  add_to_report(ctx.result.report, r, c.semigroup_slack, c.semigroup_stability);
  return r;
}

ForcingBound run_forcing(Context& ctx, const GSpec& spec) {
  const auto& c = ctx.cfg;
  ctx.log << "measuring the forced heat bound: " << c.forcing_trials << " trials\n";
  auto r = verify_forcing_bound(spec, c.forcing_end_time, c.forcing_trials, c.forcing_family);
  add_to_report(ctx.result.report, r);
  return r;
}

GSpec scaled_navier_stokes(int dim, double scale) {
  auto terms = GSpec::navier_stokes(dim).terms();
  for (auto& t : terms) {
    for (auto& a : t.a) {
      for (auto& b : a) {
        for (auto& v : b) v *= scale;
      }
    }
  }
  return GSpec(dim, terms);
}

void run_simulate(Context& ctx) {
  const auto& c = ctx.cfg;
  auto f = make_initial_field(c.solver.grid(), c.initial);
  ctx.log << "simulating to T = " << c.solver.end_time << '\n';
  auto traj = simulate(f, c.solver);
  write_trajectory(ctx, traj, "navier_stokes");
  add_run_verdicts(ctx, traj, "navier_stokes");
  double div = 0.0;
  for (const auto& d : traj.diagnostics) div = std::max(div, d.divergence_residual);
  ctx.result.report.verdicts.push_back(
      make_verdict("divergence_free", div, "<=", 1e-10 * std::max(1.0, sup_norm(f)), "navier_stokes"));
}

void run_g_system(Context& ctx) {
  const auto& c = ctx.cfg;
  auto& rep = ctx.result.report;
  const auto grid = c.solver.grid();
  auto f = make_initial_field(grid, c.initial);
  auto spec = scaled_navier_stokes(c.solver.dim, c.g_system.coefficient_scale);
  rep.constants["C_g"] = spec.c_g();

  ctx.log << "g-system run to T = " << c.solver.end_time << '\n';
  auto traj = simulate_g_system(f, spec, c.solver);
  write_trajectory(ctx, traj, "g_system");
  add_run_verdicts(ctx, traj, "g_system");
  if (c.g_system.coefficient_scale == 1.0 && !traj.terminated_early) {
    auto ns = simulate(f, c.solver);
    double d = sup_norm(ns.final().u - traj.final().u);
    rep.traces["g_system_match"] = {{"final_difference", d}};
    rep.verdicts.push_back(make_verdict("g_system_matches_navier_stokes", d, "<=", c.g_system.match_tolerance,
                                        "g_system_match"));
  }

  double C = 0.0;
  if (c.g_system.C) {
    C = *c.g_system.C;
  } else if (c.constants && c.constants->contains("C_forcing")) {
    C = (*c.constants)["C_forcing"].get<double>();
  } else {
    C = run_forcing(ctx, spec).constant;
  }
  const double c0 = g_system_window(C, spec.c_g());
  const double fs = sup_norm(f);
  SolverConfig w = c.solver;
  w.end_time = c0 / (fs * fs);
  w.snapshot_every = 0;
  if (w.dt) w.dt = std::min(*w.dt, w.end_time / 16.0);
  ctx.log << "g-system window run to c0 / |f|^2 = " << w.end_time << '\n';
  auto win = simulate_g_system(f, spec, w);
  rep.constants["C_forcing"] = C;
  rep.constants["c0_g"] = c0;
  rep.traces["g_window"] = {{"end_time", w.end_time}, {"max_sup", win.max_sup}, {"f_sup", fs}};
  rep.verdicts.push_back(make_verdict("g_window_bound", win.max_sup / fs, "<", 2.0, "g_window"));
  if (win.terminated_early) ctx.result.failure = win.termination_reason;
}

void run_verify_kernel(Context& ctx) {
  const auto& c = ctx.cfg;
  ctx.log << "kernel duality sweep\n";
  add_to_report(ctx.result.report, kernel_duality(c.kernel), c.kernel_tolerance);
  add_to_report(ctx.result.report, verify_beta_integral(1.0, c.beta_nodes));
}

void run_verify_semigroup(Context& ctx) {
  const auto& c = ctx.cfg;
  auto& rep = ctx.result.report;
  auto sg = run_semigroup(ctx);
  auto ns = GSpec::navier_stokes(c.solver.dim);
  auto fb = run_forcing(ctx, ns);
  const double C = solution_constant(sg, fb);
  rep.constants["C"] = C;
  rep.constants["c0"] = solution_window(C);
  rep.constants["C_g"] = ns.c_g();
  rep.constants["c0_g"] = g_system_window(fb.constant, ns.c_g());
  add_to_report(rep, verify_beta_integral(1.0, c.beta_nodes));
}

void run_verify_estimates(Context& ctx) {
  const auto& c = ctx.cfg;
  auto& rep = ctx.result.report;
  auto tc = c.theorem;
  if (c.theorem_C) {
    tc.C = *c.theorem_C;
  } else if (c.constants) {
    tc.C = (*c.constants)["C"].get<double>();
  } else {
    auto sg = run_semigroup(ctx);
    auto fb = run_forcing(ctx, GSpec::navier_stokes(c.solver.dim));
    tc.C = solution_constant(sg, fb);
  }
  ctx.log << "solution bounds: C = " << tc.C << ", c0 = " << solution_window(tc.C) << '\n';
  auto tb = verify_theorem_bounds(tc);
  add_to_report(rep, tb);
  {
    std::ofstream os(ctx.file("collapse.csv"));
    write_collapse_csv(os, tb);
  }
  for (const auto& run : tb.runs) {
    if (run.terminated_early) ctx.result.failure = run.termination_reason;
  }
}

void run_scaling_check(Context& ctx) {
  const auto& c = ctx.cfg;
  auto& rep = ctx.result.report;
  auto f = make_initial_field(c.solver.grid(), c.initial);
  ctx.log << "scaling check with lambda = " << c.scaling.lambda << '\n';
  add_to_report(rep, scaling_check(f, c.scaling), c.scaling_tolerance);
  if (c.future.t1) {
    const double c0 = c.constants && c.constants->contains("c0") ? (*c.constants)["c0"].get<double>() : solution_window(1.0);
    rep.constants["c0"] = c0;
    auto traj = simulate(f, c.solver);
    for (int j : c.future.orders) add_to_report(rep, future_control_check(traj, j, *c.future.t1, c0));
  }
}

void run_picard(Context& ctx) {
  const auto& c = ctx.cfg;
  auto& rep = ctx.result.report;
  auto f = make_initial_field(c.solver.grid(), c.initial);
  const auto& p = c.picard;
  ctx.log << "Picard iteration to t = " << p.time << '\n';
  auto pic = picard_solve(f, p.time, p.iterations, p.nodes);
  SolverConfig sc = c.solver;
  sc.end_time = p.time;
  sc.dt = p.dt;
  sc.diagnostics_every = 0;
  sc.snapshot_every = 0;
  auto ref = simulate(f, sc);
  const double d = sup_norm(pic.u - ref.final().u);
  rep.traces["picard"] = {{"increments", pic.increments}, {"diverged", pic.diverged}, {"difference", d}};
  rep.verdicts.push_back(make_verdict("picard_matches_simulate", d, "<=", p.tolerance, "picard"));
  rep.verdicts.push_back(make_verdict("picard_contracts", pic.diverged ? 1.0 : 0.0, "==", 0.0, "picard"));
  if (pic.diverged) ctx.result.failure = "Picard iteration did not contract";

  std::vector<double> residuals;
  for (int every : p.cadences) {
    sc.dt = p.duhamel_dt;
    sc.snapshot_every = every;
    residuals.push_back(duhamel_residual(simulate(f, sc)));
  }
  std::vector<double> orders;
  for (std::size_t i = 1; i < residuals.size(); ++i) {
    double ratio = static_cast<double>(p.cadences[i - 1]) / p.cadences[i];
    orders.push_back(std::log(residuals[i - 1] / residuals[i]) / std::log(ratio));
  }
  rep.traces["duhamel"] = {{"cadences", p.cadences}, {"residuals", residuals}, {"orders", orders}};
  rep.verdicts.push_back(
      make_verdict("duhamel_order", *std::min_element(orders.begin(), orders.end()), ">=", p.min_order, "duhamel"));
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  RunResult result;
  auto& rep = result.report;
  rep.experiment = to_string(cfg.kind);
  rep.config_hash = cfg.hash;
  rep.seeds = cfg.seeds;
  rep.timestamp = utc_timestamp();

  kernels::set_thread_count(cfg.threads > 0 ? cfg.threads : omp_get_num_procs());
  std::filesystem::create_directories(cfg.output_dir);
  Context ctx{cfg, log, result};
  try {
    switch (cfg.kind) {
      case ExperimentKind::simulate: run_simulate(ctx); break;
      case ExperimentKind::g_system: run_g_system(ctx); break;
      case ExperimentKind::verify_kernel: run_verify_kernel(ctx); break;
      case ExperimentKind::verify_semigroup: run_verify_semigroup(ctx); break;
      case ExperimentKind::verify_estimates: run_verify_estimates(ctx); break;
      case ExperimentKind::scaling_check: run_scaling_check(ctx); break;
      case ExperimentKind::picard_crosscheck: run_picard(ctx); break;
    }
  } catch (const std::exception& e) {
    result.failure = e.what();
    rep.traces["error"] = e.what();
    rep.verdicts.push_back(make_verdict("completed", 1.0, "==", 0.0, "error"));
  }

  const auto report_path = ctx.file("report.json");
  {
    std::ofstream os(report_path);
    os << rep.to_json().dump(2) << '\n';
  }
  result.exit_code = rep.passed() ? kExitPass : kExitNumerical;

  log << "experiment " << rep.experiment << " (config " << rep.config_hash << ")\n";
  for (const auto& v : rep.verdicts) {
    log << (v.passed ? "  PASS " : "  FAIL ") << v.name << ": " << v.measured << ' ' << v.comparison << ' '
        << v.threshold << '\n';
  }
  if (!result.failure.empty()) log << "numerical failure: " << result.failure << '\n';
  log << (result.exit_code == kExitPass ? "all verdicts passed" : "some verdicts failed") << "; report: "
      << report_path.string() << '\n';
  return result;
}

}  // namespace torusns::cli
