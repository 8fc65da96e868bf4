#include "dind/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dind/errors.hpp"
#include "dind/ops.hpp"
#include "dind/version.hpp"

namespace dind::sweep {
namespace {

using json = nlohmann::ordered_json;

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// RFC-4180: quote when the field contains a comma, quote, or line break.
std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char c : raw) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void validate_axis(const Axis& axis) {
  if (axis.parameter.empty()) throw UsageError("axis parameter name is empty");
  if (!(std::isfinite(axis.min) && std::isfinite(axis.max))) {
    throw UsageError("axis bounds must be finite");
  }
  if (axis.steps < 1) throw UsageError("axis needs at least 1 step");
  if (axis.steps > 1 && !(axis.min < axis.max)) {
    throw UsageError("axis needs min < max when steps > 1");
  }
  if (axis.steps == 1 && axis.min > axis.max) {
    throw UsageError("axis needs min <= max");
  }
  if (axis.scale == AxisScale::log && !(axis.min > 0.0)) {
    throw UsageError("log axis needs positive bounds");
  }
}

void validate_param_names(const SweepSpec& spec, const ops::OpInfo& op) {
  std::vector<std::string> given;
  given.push_back(spec.axis.parameter);
  if (spec.series) given.push_back(spec.series->parameter);
  for (const auto& [name, value] : spec.fixed) {
    (void)value;
    given.push_back(name);
  }
  std::sort(given.begin(), given.end());
  if (std::adjacent_find(given.begin(), given.end()) != given.end()) {
    throw UsageError("a parameter appears more than once across axis, series "
                     "and fixed values");
  }
  std::vector<std::string> expected = op.params;
  std::sort(expected.begin(), expected.end());
  if (given != expected) {
    std::ostringstream msg;
    msg << spec.operation << " takes {";
    for (size_t i = 0; i < op.params.size(); ++i) {
      msg << (i ? ", " : "") << op.params[i];
    }
    msg << "}, sweep provides {";
    for (size_t i = 0; i < given.size(); ++i) {
      msg << (i ? ", " : "") << given[i];
    }
    msg << "}";
    throw UsageError(msg.str());
  }
}

SweepSpec preset_spec(std::string operation, Axis axis,
                      std::map<std::string, double> fixed,
                      std::optional<Series> series = std::nullopt) {
  SweepSpec spec;
  spec.operation = std::move(operation);
  spec.axis = std::move(axis);
  spec.fixed = std::move(fixed);
  spec.series = std::move(series);
  return spec;
}

std::vector<NamedSpec> build_presets() {
  constexpr int kPoints = 200;
  std::vector<NamedSpec> presets;
  auto add = [&presets](std::string name, std::string description,
                        SweepSpec spec) {
    presets.push_back({std::move(name), std::move(description),
                       std::move(spec)});
  };

  add("fig1a",
      "attacks needed for L=0.001 vs blocking layers, per layer hardness",
      preset_spec("blockade_attacks_exact",
                  {"n", 1.0, 40.0, kPoints, AxisScale::linear},
                  {{"L", 0.001}},
                  Series{"p", {0.1, 0.43, 0.9}}));
  add("fig1b",
      "attacks needed for L=0.001 vs per-layer failure, per layer count",
      preset_spec("blockade_attacks_exact",
                  {"p", 0.01, 0.99, kPoints, AxisScale::linear},
                  {{"L", 0.001}},
                  Series{"n", {5.0, 10.0, 20.0}}));
  add("fig1c",
      "semilog twin of fig1a over a wider layer range",
      preset_spec("blockade_attacks_exact",
                  {"n", 1.0, 100.0, kPoints, AxisScale::log},
                  {{"L", 0.001}},
                  Series{"p", {0.1, 0.43, 0.9}}));
  add("fig1d",
      "breach likelihood vs blocking layers at p=0.43, per attack count",
      preset_spec("blockade_likelihood",
                  {"n", 1.0, 40.0, kPoints, AxisScale::linear},
                  {{"p", 0.43}},
                  Series{"N", {5.0, 5e3, 5e6}}));
  add("fig2",
      "layer hardness keeping L=0.001 vs attack count, per layer count",
      preset_spec("blockade_hardness",
                  {"N", 1.0, 1e12, kPoints, AxisScale::log},
                  {{"L", 0.001}},
                  Series{"n", {5.0, 10.0, 20.0, 40.0}}));
  add("fig3a",
      "delay-model breach likelihood vs layers at lambda*tau=1, per attack "
      "count",
      preset_spec("delay_likelihood",
                  {"n", 1.0, 40.0, kPoints, AxisScale::linear},
                  {{"lambda", 1.0}, {"tau", 1.0}},
                  Series{"N", {1e3, 1e6, 1e9}}));
  add("fig3b",
      "speedup compensated by layer count at L=0.001, N_a=1000, T=1e5*tau",
      preset_spec("compensating_speedup",
                  {"n", 1.0, 40.0, kPoints, AxisScale::linear},
                  {{"L", 0.001},
                   {"tau", 1.0},
                   {"N_a", 1000.0},
                   {"T", 1e5},
                   {"lambda", 1.0}}));
  add("fig3c",
      "delay layers needed for L=0.001 vs attacks, linear attack axis",
      preset_spec("delay_min_defenses",
                  {"N", 1.0, 1e6, kPoints, AxisScale::linear},
                  {{"L", 0.001}, {"lambda", 1.0}, {"tau", 1.0}}));
  add("fig3d",
      "delay layers needed for L=0.001 vs speedup, linear speedup axis",
      preset_spec("delay_min_defenses_horizon",
                  {"s", 1.0, 1e6, kPoints, AxisScale::linear},
                  {{"L", 0.001},
                   {"lambda", 1.0},
                   {"tau", 1.0},
                   {"N_a", 1000.0},
                   {"T", 1e5}}));
  add("fig3e",
      "delay layers needed for L=0.001 vs attacks, log attack axis",
      preset_spec("delay_min_defenses",
                  {"N", 1.0, 1e12, kPoints, AxisScale::log},
                  {{"L", 0.001}, {"lambda", 1.0}, {"tau", 1.0}}));
  add("fig3f",
      "delay layers needed for L=0.001 vs speedup, log speedup axis",
      preset_spec("delay_min_defenses_horizon",
                  {"s", 1.0, 1e6, kPoints, AxisScale::log},
                  {{"L", 0.001},
                   {"lambda", 1.0},
                   {"tau", 1.0},
                   {"N_a", 1000.0},
                   {"T", 1e5}}));
  add("fig4a",
      "delay layers needed for L=0.001 vs speed advantage, linear axis",
      preset_spec("delay_min_defenses",
                  {"lambda", 0.25, 4.0, kPoints, AxisScale::linear},
                  {{"L", 0.001}, {"tau", 1.0}, {"N", 1e6}}));
  add("fig4b",
      "delay layers needed for L=0.001 vs speed advantage, log axis",
      preset_spec("delay_min_defenses",
                  {"lambda", 0.25, 4.0, kPoints, AxisScale::log},
                  {{"L", 0.001}, {"tau", 1.0}, {"N", 1e6}}));
  add("fig4c",
      "attacks tolerated at L=0.001 vs speed advantage, linear axis",
      preset_spec("delay_attacks_exact",
                  {"lambda", 0.25, 4.0, kPoints, AxisScale::linear},
                  {{"L", 0.001}, {"tau", 1.0}, {"n", 10.0}}));
  add("fig4d",
      "attacks tolerated at L=0.001 vs speed advantage, log axis",
      preset_spec("delay_attacks_exact",
                  {"lambda", 0.25, 4.0, kPoints, AxisScale::log},
                  {{"L", 0.001}, {"tau", 1.0}, {"n", 10.0}}));
  return presets;
}

json spec_to_json_obj(const SweepSpec& spec) {
  json j;
  j["operation"] = spec.operation;
  json axis;
  axis["parameter"] = spec.axis.parameter;
  axis["min"] = spec.axis.min;
  axis["max"] = spec.axis.max;
  axis["steps"] = spec.axis.steps;
  axis["scale"] = spec.axis.scale == AxisScale::log ? "log" : "linear";
  j["axis"] = std::move(axis);
  json fixed = json::object();
  for (const auto& [name, value] : spec.fixed) fixed[name] = value;
  j["fixed"] = std::move(fixed);
  if (spec.series) {
    json series;
    series["parameter"] = spec.series->parameter;
    series["values"] = spec.series->values;
    j["series"] = std::move(series);
  }
  return j;
}

double require_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw UsageError(where + " must be a number");
  return j.get<double>();
}

}  // namespace

std::vector<double> axis_points(const Axis& axis) {
  validate_axis(axis);
  std::vector<double> points;
  points.reserve(static_cast<size_t>(axis.steps));
  if (axis.steps == 1) {
    points.push_back(axis.min);
    return points;
  }
  const int last = axis.steps - 1;
  for (int i = 0; i <= last; ++i) {
    if (i == 0) {
      points.push_back(axis.min);
    } else if (i == last) {
      points.push_back(axis.max);
    } else if (axis.scale == AxisScale::log) {
      const double t = static_cast<double>(i) / last;
      points.push_back(
          std::exp(std::log(axis.min) +
                   t * (std::log(axis.max) - std::log(axis.min))));
    } else {
      const double t = static_cast<double>(i) / last;
      points.push_back(axis.min + t * (axis.max - axis.min));
    }
  }
  return points;
}

SweepTable run_sweep(const SweepSpec& spec) {
  const ops::OpInfo* op = ops::find(spec.operation);
  if (op == nullptr) {
    throw UsageError("unknown operation \"" + spec.operation + "\"");
  }
  if (spec.series && spec.series->values.empty()) {
    throw UsageError("series has no values");
  }
  validate_param_names(spec, *op);
  const std::vector<double> points = axis_points(spec.axis);

  SweepTable table;
  table.provenance.push_back(std::string("dind sweep ") + kVersion);
  table.provenance.push_back("spec " + spec_to_json(spec));
  table.columns.push_back(spec.axis.parameter);
  if (spec.series) table.columns.push_back(spec.series->parameter);
  table.columns.push_back(spec.operation);

  const std::vector<double> series_values =
      spec.series ? spec.series->values : std::vector<double>{0.0};
  ops::ParamMap args = spec.fixed;
  for (double x : points) {
    args[spec.axis.parameter] = x;
    for (double sv : series_values) {
      std::vector<std::optional<double>> row;
      row.push_back(x);
      if (spec.series) {
        args[spec.series->parameter] = sv;
        row.push_back(sv);
      }
      try {
        const double value = op->eval(args);
        if (!std::isfinite(value)) {
          throw std::domain_error("result is not finite");
        }
        row.push_back(value);
      } catch (const std::exception& err) {
        std::ostringstream warning;
        warning << spec.operation << " at " << spec.axis.parameter << "="
                << format_value(x);
        if (spec.series) {
          warning << ", " << spec.series->parameter << "=" << format_value(sv);
        }
        warning << ": " << err.what();
        table.warnings.push_back(warning.str());
        row.push_back(std::nullopt);
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

const std::vector<NamedSpec>& figure_presets() {
  static const std::vector<NamedSpec> presets = build_presets();
  return presets;
}

const NamedSpec* find_preset(const std::string& name) {
  for (const NamedSpec& preset : figure_presets()) {
    if (preset.name == name) return &preset;
  }
  return nullptr;
}

void emit_csv(const SweepTable& table, std::ostream& out) {
  for (const std::string& line : table.provenance) {
    out << "# " << line << "\n";
  }
  for (size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << csv_field(table.columns[i]);
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      if (row[i]) out << csv_field(format_value(*row[i]));
    }
    out << "\n";
  }
}

void emit_jsonl(const SweepTable& table, std::ostream& out) {
  for (const auto& row : table.rows) {
    json obj;
    for (size_t i = 0; i < table.columns.size(); ++i) {
      if (i < row.size() && row[i]) {
        obj[table.columns[i]] = *row[i];
      } else {
        obj[table.columns[i]] = nullptr;
      }
    }
    out << obj.dump() << "\n";
  }
}

SweepSpec spec_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw UsageError(std::string("sweep spec is not valid JSON: ") +
                     err.what());
  }
  if (!doc.is_object()) throw UsageError("sweep spec must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "operation" && key != "axis" && key != "fixed" &&
        key != "series" && key != "comment") {
      throw UsageError("sweep spec has unknown field \"" + key + "\"");
    }
  }
  if (!doc.contains("operation") || !doc["operation"].is_string()) {
    throw UsageError("sweep spec needs a string \"operation\"");
  }
  if (!doc.contains("axis") || !doc["axis"].is_object()) {
    throw UsageError("sweep spec needs an \"axis\" object");
  }

  SweepSpec spec;
  spec.operation = doc["operation"].get<std::string>();
  const json& axis = doc["axis"];
  if (!axis.contains("parameter") || !axis["parameter"].is_string()) {
    throw UsageError("axis needs a string \"parameter\"");
  }
  spec.axis.parameter = axis["parameter"].get<std::string>();
  if (!axis.contains("min") || !axis.contains("max") ||
      !axis.contains("steps")) {
    throw UsageError("axis needs min, max and steps");
  }
  spec.axis.min = require_number(axis["min"], "axis min");
  spec.axis.max = require_number(axis["max"], "axis max");
  const double steps = require_number(axis["steps"], "axis steps");
  if (!(steps >= 1.0 && steps == std::floor(steps) && steps <= 1e7)) {
    throw UsageError("axis steps must be a positive integer");
  }
  spec.axis.steps = static_cast<int>(steps);
  if (axis.contains("scale")) {
    if (!axis["scale"].is_string()) {
      throw UsageError("axis scale must be \"linear\" or \"log\"");
    }
    const std::string scale = axis["scale"].get<std::string>();
    if (scale == "log") {
      spec.axis.scale = AxisScale::log;
    } else if (scale == "linear") {
      spec.axis.scale = AxisScale::linear;
    } else {
      throw UsageError("axis scale must be \"linear\" or \"log\", got \"" +
                       scale + "\"");
    }
  }
  if (doc.contains("fixed")) {
    if (!doc["fixed"].is_object()) {
      throw UsageError("\"fixed\" must map parameter names to numbers");
    }
    for (const auto& [name, value] : doc["fixed"].items()) {
      spec.fixed[name] = require_number(value, "fixed " + name);
    }
  }
  if (doc.contains("series")) {
    const json& series = doc["series"];
    if (!series.is_object() || !series.contains("parameter") ||
        !series["parameter"].is_string() || !series.contains("values") ||
        !series["values"].is_array()) {
      throw UsageError(
          "\"series\" needs a string \"parameter\" and a \"values\" array");
    }
    Series s;
    s.parameter = series["parameter"].get<std::string>();
    for (const json& v : series["values"]) {
      s.values.push_back(require_number(v, "series value"));
    }
    if (s.values.empty()) throw UsageError("series has no values");
    spec.series = std::move(s);
  }
  return spec;
}

std::string spec_to_json(const SweepSpec& spec) {
  return spec_to_json_obj(spec).dump();
}

}  // namespace dind::sweep
