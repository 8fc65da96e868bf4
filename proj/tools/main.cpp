// dind: breach-likelihood calculations for layered defenses.
//
//   dind eval <operation> --<param> <value> ...
//   dind solve <model> --unknown <param> --L <target> --<param> <value> ...
//   dind simulate <model> --trials <count> --seed <seed> ...
//   dind sweep --preset <name> | --spec <file> | --op <operation> --axis ...
//   dind presets [--show <name>]
//
// Exit codes: 0 success, 2 usage error, 1 domain or solve error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dind/errors.hpp"
#include "dind/models.hpp"
#include "dind/montecarlo.hpp"
#include "dind/ops.hpp"
#include "dind/solvers.hpp"
#include "dind/sweep.hpp"
#include "dind/version.hpp"

namespace {

using dind::Probability;
using dind::UsageError;
using json = nlohmann::ordered_json;

std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_human(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string csv_escape(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char c : raw) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

enum class OutFormat { human, csv, json };

OutFormat parse_format(const std::string& text) {
  if (text == "human") return OutFormat::human;
  if (text == "csv") return OutFormat::csv;
  if (text == "json") return OutFormat::json;
  throw UsageError("--format must be human, csv or json, got \"" + text +
                   "\"");
}

// Ordered key/value output rendered as aligned text, CSV rows, or one JSON
// object, so every subcommand shares the precision rules.
struct Report {
  OutFormat format = OutFormat::human;
  std::vector<std::pair<std::string, json>> fields;

  void add(std::string key, json value) {
    fields.emplace_back(std::move(key), std::move(value));
  }

  void print(std::ostream& out) const {
    if (format == OutFormat::json) {
      json obj;
      for (const auto& [key, value] : fields) obj[key] = value;
      out << obj.dump() << "\n";
      return;
    }
    for (const auto& [key, value] : fields) {
      std::string text;
      if (value.is_number_float()) {
        text = format == OutFormat::human ? fmt_human(value.get<double>())
                                          : fmt_full(value.get<double>());
      } else if (value.is_string()) {
        text = value.get<std::string>();
      } else {
        text = value.dump();
      }
      if (format == OutFormat::csv) {
        out << csv_escape(key) << "," << csv_escape(text) << "\n";
      } else {
        out << key << " = " << text << "\n";
      }
    }
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(what + " \"" + text + "\" is not a number");
  }
}

// Shared parameter flags; every value lands in a name -> value map keyed by
// the models' conventional symbols.
void add_param_options(CLI::App* cmd, std::map<std::string, double>& out) {
  auto bind = [cmd, &out](const std::string& names, const std::string& key,
                          const std::string& help) {
    cmd->add_option_function<double>(
        names, [&out, key](double v) { out[key] = v; }, help);
  };
  bind("--p", "p", "per-layer failure (break) probability");
  bind("--d", "d", "per-attempt detection probability");
  bind("--n", "n", "number of defensive layers");
  bind("--N", "N", "number of attacks");
  bind("--NA,--N_A", "N_A", "number of campaigns");
  bind("--Na,--N_a", "N_a", "number of attackers");
  bind("--L", "L", "breach likelihood (target or held constant)");
  bind("--lambda", "lambda", "detection rate while a layer is under attack");
  bind("--tau", "tau", "characteristic time to overcome one layer");
  bind("--T", "T", "attack time horizon");
  bind("--s", "s", "attack speedup factor");
}

// Missing/unexpected names for a fixed parameter shape, as one usage error.
void check_shape(const std::string& what,
                 const std::map<std::string, double>& given,
                 const std::vector<std::string>& required,
                 const std::vector<std::string>& optional = {}) {
  std::vector<std::string> missing;
  for (const std::string& name : required) {
    if (given.find(name) == given.end()) missing.push_back(name);
  }
  std::vector<std::string> unexpected;
  for (const auto& [name, value] : given) {
    (void)value;
    bool known = false;
    for (const std::string& r : required) known = known || r == name;
    for (const std::string& o : optional) known = known || o == name;
    if (!known) unexpected.push_back(name);
  }
  if (missing.empty() && unexpected.empty()) return;
  std::ostringstream msg;
  msg << what << " takes {";
  for (size_t i = 0; i < required.size(); ++i) {
    msg << (i ? ", " : "") << required[i];
  }
  for (const std::string& o : optional) msg << ", [" << o << "]";
  msg << "}";
  if (!missing.empty()) {
    msg << "; missing";
    for (const std::string& m : missing) msg << " --" << m;
  }
  if (!unexpected.empty()) {
    msg << "; unexpected";
    for (const std::string& u : unexpected) msg << " --" << u;
  }
  throw UsageError(msg.str());
}

double get_or(const std::map<std::string, double>& m, const std::string& key,
              double fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

// ---------------------------------------------------------------- eval ----

struct EvalState {
  std::string op;
  bool list = false;
  std::map<std::string, double> params;
  std::vector<double> ps;
  std::string format = "human";
};

void add_report_fields(Report& out, const dind::solvers::ApproxReport& rep) {
  out.add("quantity", rep.quantity);
  out.add("exact", rep.exact);
  out.add("approximate", rep.approximate);
  out.add("relative_error", rep.relative_error);
  for (const auto& flag : rep.regime_flags) {
    out.add("regime " + flag.name, flag.value);
  }
}

void do_eval(const EvalState& st) {
  Report out{parse_format(st.format), {}};
  if (st.list) {
    for (const auto& op : dind::ops::registry()) {
      std::ostringstream line;
      line << op.name << " {";
      for (size_t i = 0; i < op.params.size(); ++i) {
        line << (i ? ", " : "") << op.params[i];
      }
      line << "}: " << op.summary;
      std::cout << line.str() << "\n";
    }
    std::cout << "expected_attempts_mixed {--ps p1,p2,...}: expected failed "
                 "attempts for per-layer hardnesses\n"
                 "report_attacks {L, p, n}: exact vs approximate attack "
                 "count\n"
                 "report_speedup {L, tau, N_a, T, lambda, n}: exact vs "
                 "approximate compensating speedup\n"
                 "report_viability {p, d, n, N_A}: combined likelihood vs its "
                 "margin approximation\n"
                 "combined {p, d, n, N_A}: approximate and exact combined "
                 "likelihood side by side\n"
                 "undetected_success {p, d, n}: approximate and exact "
                 "per-campaign success side by side\n";
    return;
  }
  const std::string& name = st.op;
  if (name.empty()) throw UsageError("eval needs an operation name");

  if (!st.ps.empty() && name != "expected_attempts_mixed") {
    throw UsageError("--ps only applies to expected_attempts_mixed");
  }

  if (name == "combined" || name == "combined_likelihood" ||
      name == "combined_likelihood_approx" ||
      name == "combined_likelihood_exact") {
    out.add("combined_likelihood_approx",
            dind::ops::evaluate("combined_likelihood_approx", st.params));
    out.add("combined_likelihood_exact",
            dind::ops::evaluate("combined_likelihood_exact", st.params));
  } else if (name == "undetected_success" ||
             name == "undetected_success_approx" ||
             name == "undetected_success_exact") {
    out.add("undetected_success_approx",
            dind::ops::evaluate("undetected_success_approx", st.params));
    out.add("undetected_success_exact",
            dind::ops::evaluate("undetected_success_exact", st.params));
  } else if (name == "expected_attempts_mixed") {
    if (st.ps.empty()) {
      throw UsageError("expected_attempts_mixed needs --ps p1,p2,...");
    }
    check_shape(name, st.params, {});
    std::vector<Probability> hardness;
    hardness.reserve(st.ps.size());
    for (double v : st.ps) hardness.emplace_back(v, "ps entry");
    out.add(name, dind::models::expected_attempts_mixed(hardness));
  } else if (name == "report_attacks") {
    check_shape(name, st.params, {"L", "p", "n"});
    add_report_fields(out, dind::solvers::approximation_report(
                               dind::solvers::ApproxKind::attack_count,
                               st.params));
  } else if (name == "report_speedup") {
    check_shape(name, st.params, {"L", "tau", "N_a", "T", "lambda", "n"});
    add_report_fields(
        out, dind::solvers::approximation_report(
                 dind::solvers::ApproxKind::speedup, st.params));
  } else if (name == "report_viability") {
    check_shape(name, st.params, {"p", "d", "n", "N_A"});
    add_report_fields(
        out, dind::solvers::approximation_report(
                 dind::solvers::ApproxKind::viability, st.params));
  } else {
    const dind::ops::OpInfo* op = dind::ops::find(name);
    if (op == nullptr) {
      std::ostringstream msg;
      msg << "unknown operation \"" << name
          << "\"; run `dind eval --list` for the catalog";
      throw UsageError(msg.str());
    }
    out.add(name, dind::ops::evaluate(*op, st.params));
  }
  out.print(std::cout);
}

// --------------------------------------------------------------- solve ----

struct SolveState {
  std::string model;
  std::string unknown;
  bool integer = false;
  bool exact = false;
  std::map<std::string, double> params;
  std::string format = "human";
};

void do_solve(const SolveState& st) {
  Report out{parse_format(st.format), {}};
  dind::solvers::SolveRequest req;
  if (st.model == "blockade") {
    req.model = dind::solvers::SolveModel::blockade;
  } else if (st.model == "delay") {
    req.model = dind::solvers::SolveModel::delay;
  } else if (st.model == "combined") {
    req.model = dind::solvers::SolveModel::combined;
  } else {
    throw UsageError("solve model must be blockade, delay or combined, got \"" +
                     st.model + "\"");
  }
  auto it = st.params.find("L");
  if (it == st.params.end()) {
    throw UsageError("solve needs --L, the target breach likelihood");
  }
  req.target = it->second;
  req.unknown = st.unknown;
  req.integer_constraint = st.integer;
  req.exact_per_campaign = st.exact;
  req.fixed = st.params;
  req.fixed.erase("L");
  const double value = dind::solvers::solve(req);

  // Round-trip: evaluate the model forward at the solved value.
  dind::ops::ParamMap args = req.fixed;
  args[req.unknown] = value;
  std::string forward;
  switch (req.model) {
    case dind::solvers::SolveModel::blockade:
      forward = "blockade_likelihood";
      break;
    case dind::solvers::SolveModel::delay:
      forward = args.count("N_a") ? "delay_likelihood_over_time"
                                  : "delay_likelihood";
      break;
    case dind::solvers::SolveModel::combined:
      forward = st.exact ? "combined_likelihood_exact"
                         : "combined_likelihood_approx";
      break;
  }
  const double achieved = dind::ops::evaluate(forward, args);

  if (st.integer) {
    out.add(req.unknown, static_cast<std::int64_t>(std::llround(value)));
  } else {
    out.add(req.unknown, value);
  }
  out.add("achieved_L", achieved);
  out.add("target_L", req.target);
  out.add("residual", achieved - req.target);
  out.print(std::cout);
}

// ------------------------------------------------------------ simulate ----

struct SimState {
  std::string model;
  std::map<std::string, double> params;
  double trials = 100000;
  std::uint64_t seed = 0;
  int threads = -1;  // unset; 0 means auto
  std::string scope = "failed_attempts_only";
  std::string spec_path;
  std::string format = "human";
  CLI::Option* trials_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* scope_opt = nullptr;
};

std::uint64_t parse_trials(double raw) {
  if (!(raw >= 1 && raw <= 1e15 && raw == std::floor(raw))) {
    throw UsageError("--trials must be a positive integer");
  }
  return static_cast<std::uint64_t>(raw);
}

dind::mc::DetectionScope parse_scope(const std::string& text) {
  if (text == "failed" || text == "failed_attempts_only") {
    return dind::mc::DetectionScope::failed_attempts_only;
  }
  if (text == "all" || text == "all_attempts") {
    return dind::mc::DetectionScope::all_attempts;
  }
  throw UsageError("--scope must be failed or all, got \"" + text + "\"");
}

unsigned resolve_threads(int flag_value) {
  if (flag_value >= 0) return static_cast<unsigned>(flag_value);
  if (const char* env = std::getenv("DIND_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v > 1024) {
      throw UsageError("DIND_THREADS must be a small non-negative integer");
    }
    return static_cast<unsigned>(v);
  }
  return 0;
}

dind::mc::SimScenario scenario_from_flags(const SimState& st) {
  dind::mc::SimScenario scenario;
  scenario.model = st.model;
  const auto& given = st.params;
  if (st.model == "blockade") {
    check_shape("simulate blockade", given, {"p", "n", "N"});
    dind::models::BlockadeParams params;
    params.layer_failure = Probability(given.at("p"), "p");
    params.layers = given.at("n");
    params.attacks = given.at("N");
    scenario.params = params;
  } else if (st.model == "delay_single") {
    check_shape("simulate delay_single", given, {"lambda", "n"}, {"tau"});
    dind::models::DelayParams params;
    params.detection_rate = given.at("lambda");
    params.layer_time = get_or(given, "tau", 1.0);
    params.layers = given.at("n");
    scenario.params = params;
  } else if (st.model == "delay_horizon") {
    check_shape("simulate delay_horizon", given, {"lambda", "n", "N_a", "T"},
                {"tau", "s"});
    dind::models::DelayParams params;
    params.detection_rate = given.at("lambda");
    params.layer_time = get_or(given, "tau", 1.0);
    params.layers = given.at("n");
    params.attackers = given.at("N_a");
    params.horizon = given.at("T");
    params.speedup = get_or(given, "s", 1.0);
    scenario.params = params;
  } else if (st.model == "combined") {
    check_shape("simulate combined", given, {"p", "d", "n", "N_A"});
    dind::models::CombinedParams params;
    params.break_prob = Probability(given.at("p"), "p");
    params.detect_prob = Probability(given.at("d"), "d");
    params.layers = given.at("n");
    params.campaigns = given.at("N_A");
    scenario.params = params;
  } else if (st.model.empty()) {
    throw UsageError("simulate needs a model (or --spec <file>): blockade, "
                     "delay_single, delay_horizon or combined");
  } else {
    throw UsageError("simulate model must be blockade, delay_single, "
                     "delay_horizon or combined, got \"" + st.model + "\"");
  }
  return scenario;
}

void add_estimate_fields(Report& out, const dind::mc::SimEstimate& est) {
  out.add("estimate", est.mean);
  out.add("std_error", est.std_error);
  out.add("ci95_low", est.ci95_low);
  out.add("ci95_high", est.ci95_high);
  out.add("successes", est.successes);
  out.add("trials", est.trials);
}

void do_simulate(const SimState& st) {
  Report out{parse_format(st.format), {}};
  dind::mc::SimScenario scenario;
  if (!st.spec_path.empty()) {
    if (!st.model.empty()) {
      throw UsageError("give either --spec or a model on the command line, "
                       "not both");
    }
    scenario = dind::mc::scenario_from_json_text(read_file(st.spec_path));
    if (st.trials_opt->count()) scenario.config.trials = parse_trials(st.trials);
    if (st.seed_opt->count()) scenario.config.seed = st.seed;
    if (st.scope_opt->count()) {
      scenario.config.detection_scope = parse_scope(st.scope);
    }
  } else {
    scenario = scenario_from_flags(st);
    scenario.config.trials = parse_trials(st.trials);
    scenario.config.seed = st.seed;
    scenario.config.detection_scope = parse_scope(st.scope);
  }
  scenario.config.threads = resolve_threads(st.threads);

  out.add("model", scenario.model);
  out.add("seed", scenario.config.seed);

  bool under_resolved = false;
  if (scenario.model == "blockade") {
    const auto& params = std::get<dind::models::BlockadeParams>(scenario.params);
    const auto est = dind::mc::sim_blockade(params, scenario.config);
    add_estimate_fields(out, est);
    out.add("analytic", dind::models::blockade_likelihood(params).value());
    under_resolved = est.under_resolved;
  } else if (scenario.model == "delay_single") {
    const auto& params = std::get<dind::models::DelayParams>(scenario.params);
    const auto est = dind::mc::sim_delay_single(params, scenario.config);
    add_estimate_fields(out, est);
    out.add("analytic",
            dind::models::delay_single_success(params.detection_rate,
                                               params.layer_time,
                                               params.layers)
                .value());
    under_resolved = est.under_resolved;
  } else if (scenario.model == "delay_horizon") {
    const auto& params = std::get<dind::models::DelayParams>(scenario.params);
    const auto horizon = dind::mc::sim_delay_horizon(params, scenario.config);
    add_estimate_fields(out, horizon.estimate);
    out.add("analytic",
            dind::models::delay_likelihood_over_time(params).value());
    out.add("measured_time_per_attack", horizon.measured_time_per_attack);
    out.add("modeled_time_per_attack", horizon.modeled_time_per_attack);
    out.add("completed_attacks", horizon.completed_attacks);
    under_resolved = horizon.estimate.under_resolved;
  } else if (scenario.model == "combined") {
    const auto& params = std::get<dind::models::CombinedParams>(scenario.params);
    out.add("scope", scenario.config.detection_scope ==
                             dind::mc::DetectionScope::all_attempts
                         ? "all_attempts"
                         : "failed_attempts_only");
    const auto est = dind::mc::sim_combined(params, scenario.config);
    add_estimate_fields(out, est);
    const double p = params.break_prob.value();
    const double d = params.detect_prob.value();
    double per_campaign;
    if (scenario.config.detection_scope ==
        dind::mc::DetectionScope::all_attempts) {
      // Detection also applies to successful breaks: per attempt the
      // campaign survives-and-advances with p(1-d) out of 1-(1-p)(1-d).
      per_campaign = std::pow(p * (1.0 - d) / (p + d * (1.0 - p)),
                              params.layers);
    } else {
      per_campaign = dind::models::undetected_success_exact(params).value();
    }
    out.add("analytic",
            dind::models::combined_likelihood(params,
                                              Probability(per_campaign))
                .value());
    out.add("analytic_mean_attempts_form",
            dind::models::combined_likelihood(
                params, dind::models::undetected_success_approx(params))
                .value());
    under_resolved = est.under_resolved;
  }
  if (under_resolved) {
    out.add("note", "fewer than 50 successes; increase --trials to resolve");
  }
  out.print(std::cout);
}

// --------------------------------------------------------------- sweep ----

struct SweepState {
  std::string preset;
  std::string spec_path;
  std::string op;
  std::string axis_text;
  std::string series_text;
  std::map<std::string, double> fixed;
  int points = 0;
  std::string out_path;
  std::string format = "csv";
};

dind::sweep::Axis parse_axis(const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() != 4 && parts.size() != 5) {
    throw UsageError("--axis wants name:min:max:steps[:lin|log], got \"" +
                     text + "\"");
  }
  dind::sweep::Axis axis;
  axis.parameter = parts[0];
  axis.min = parse_double(parts[1], "axis min");
  axis.max = parse_double(parts[2], "axis max");
  const double steps = parse_double(parts[3], "axis steps");
  if (!(steps >= 1 && steps <= 1e7 && steps == std::floor(steps))) {
    throw UsageError("axis steps must be a positive integer");
  }
  axis.steps = static_cast<int>(steps);
  if (parts.size() == 5) {
    if (parts[4] == "log") {
      axis.scale = dind::sweep::AxisScale::log;
    } else if (parts[4] == "lin" || parts[4] == "linear") {
      axis.scale = dind::sweep::AxisScale::linear;
    } else {
      throw UsageError("axis scale must be lin or log, got \"" + parts[4] +
                       "\"");
    }
  }
  return axis;
}

dind::sweep::Series parse_series(const std::string& text) {
  const size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= text.size()) {
    throw UsageError("--series wants name=v1,v2,..., got \"" + text + "\"");
  }
  dind::sweep::Series series;
  series.parameter = text.substr(0, eq);
  for (const std::string& item : split(text.substr(eq + 1), ',')) {
    series.values.push_back(parse_double(item, "series value"));
  }
  return series;
}

void do_sweep(const SweepState& st) {
  int sources = 0;
  sources += !st.preset.empty();
  sources += !st.spec_path.empty();
  sources += !st.op.empty();
  if (sources != 1) {
    throw UsageError("sweep wants exactly one of --preset, --spec or --op");
  }

  dind::sweep::SweepSpec spec;
  if (!st.preset.empty()) {
    const dind::sweep::NamedSpec* preset = dind::sweep::find_preset(st.preset);
    if (preset == nullptr) {
      std::ostringstream msg;
      msg << "unknown preset \"" << st.preset << "\"; available:";
      for (const auto& p : dind::sweep::figure_presets()) msg << " " << p.name;
      throw UsageError(msg.str());
    }
    spec = preset->spec;
  } else if (!st.spec_path.empty()) {
    spec = dind::sweep::spec_from_json_text(read_file(st.spec_path));
  } else {
    if (st.axis_text.empty()) throw UsageError("sweep --op needs --axis");
    spec.operation = st.op;
    spec.axis = parse_axis(st.axis_text);
    spec.fixed = st.fixed;
    if (!st.series_text.empty()) spec.series = parse_series(st.series_text);
  }
  if (st.points > 0) spec.axis.steps = st.points;

  const dind::sweep::SweepTable table = dind::sweep::run_sweep(spec);
  for (const std::string& warning : table.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!st.out_path.empty()) {
    file.open(st.out_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write \"" + st.out_path + "\"");
    out = &file;
  }
  if (st.format == "csv") {
    dind::sweep::emit_csv(table, *out);
  } else if (st.format == "jsonl" || st.format == "json") {
    dind::sweep::emit_jsonl(table, *out);
  } else {
    throw UsageError("sweep --format must be csv or jsonl, got \"" +
                     st.format + "\"");
  }
}

// ------------------------------------------------------------- presets ----

void do_presets(const std::string& show) {
  if (!show.empty()) {
    const dind::sweep::NamedSpec* preset = dind::sweep::find_preset(show);
    if (preset == nullptr) {
      throw UsageError("unknown preset \"" + show + "\"");
    }
    std::cout << dind::sweep::spec_to_json(preset->spec) << "\n";
    return;
  }
  for (const auto& preset : dind::sweep::figure_presets()) {
    std::printf("%-7s %s\n", preset.name.c_str(),
                preset.description.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"breach likelihood of layered defenses: closed forms, "
               "solvers, simulation and sweeps"};
  app.set_version_flag("--version", dind::kVersion);
  app.require_subcommand(1);

  EvalState eval_state;
  CLI::App* eval = app.add_subcommand(
      "eval", "evaluate one operation at a point");
  eval->add_option("operation", eval_state.op, "operation name");
  eval->add_flag("--list", eval_state.list, "list operations and exit");
  add_param_options(eval, eval_state.params);
  eval->add_option("--ps", eval_state.ps,
                   "per-layer failure probabilities (comma separated)")
      ->delimiter(',');
  eval->add_option("--format", eval_state.format, "human, csv or json");
  eval->callback([&eval_state] { do_eval(eval_state); });

  SolveState solve_state;
  CLI::App* solve = app.add_subcommand(
      "solve", "invert a model for one unknown at a target likelihood");
  solve->add_option("model", solve_state.model,
                    "blockade, delay or combined")->required();
  solve->add_option("--unknown", solve_state.unknown,
                    "parameter to solve for")->required();
  solve->add_flag("--integer", solve_state.integer,
                  "round counts to the defender-safe side");
  solve->add_flag("--exact", solve_state.exact,
                  "combined model: use the exact per-campaign form");
  add_param_options(solve, solve_state.params);
  solve->add_option("--format", solve_state.format, "human, csv or json");
  solve->callback([&solve_state] { do_solve(solve_state); });

  SimState sim_state;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo estimate next to the closed form");
  simulate->add_option("model", sim_state.model,
                       "blockade, delay_single, delay_horizon or combined");
  add_param_options(simulate, sim_state.params);
  sim_state.trials_opt =
      simulate->add_option("--trials", sim_state.trials, "number of trials");
  sim_state.seed_opt =
      simulate->add_option("--seed", sim_state.seed, "base RNG seed");
  simulate->add_option("--threads", sim_state.threads,
                       "worker threads (0 = all cores; default from "
                       "DIND_THREADS)");
  sim_state.scope_opt = simulate->add_option(
      "--scope", sim_state.scope,
      "combined model detection scope: failed or all");
  simulate->add_option("--spec", sim_state.spec_path,
                       "JSON scenario file instead of flags");
  simulate->add_option("--format", sim_state.format, "human, csv or json");
  simulate->callback([&sim_state] { do_simulate(sim_state); });

  SweepState sweep_state;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "evaluate an operation over a parameter grid");
  sweep->add_option("--preset", sweep_state.preset, "named figure preset");
  sweep->add_option("--spec", sweep_state.spec_path, "JSON sweep spec file");
  sweep->add_option("--op", sweep_state.op, "operation to sweep");
  sweep->add_option("--axis", sweep_state.axis_text,
                    "axis as name:min:max:steps[:lin|log]");
  sweep->add_option("--series", sweep_state.series_text,
                    "series as name=v1,v2,...");
  add_param_options(sweep, sweep_state.fixed);
  sweep->add_option("--points", sweep_state.points,
                    "override the number of axis points");
  sweep->add_option("-o,--out", sweep_state.out_path,
                    "output file (default: stdout)");
  sweep->add_option("--format", sweep_state.format, "csv or jsonl");
  sweep->callback([&sweep_state] { do_sweep(sweep_state); });

  std::string show_preset;
  CLI::App* presets = app.add_subcommand(
      "presets", "list the named figure presets");
  presets->add_option("--show", show_preset,
                      "print one preset's sweep spec as JSON");
  presets->callback([&show_preset] { do_presets(show_preset); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    // Covers UsageError: a structurally bad request.
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
