#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

// Parameter-sweep grids over the registered operations, with tabular output
// in CSV or JSON-lines form and presets reproducing the standard figures.

namespace dind::sweep {

enum class AxisScale { linear, log };

struct Axis {
  std::string parameter;
  double min = 0.0;
  double max = 0.0;
  int steps = 0;
  AxisScale scale = AxisScale::linear;
};

struct Series {
  std::string parameter;
  std::vector<double> values;
};

struct SweepSpec {
  std::string operation;
  Axis axis;
  std::map<std::string, double> fixed;
  std::optional<Series> series;
};

// Rectangular table: one row per axis point per series value, axis-major.
// Cells that failed to evaluate are empty (nullopt), never zero.
struct SweepTable {
  std::vector<std::string> provenance;  // emitted as '#' comment lines
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
  std::vector<std::string> warnings;  // one per failed cell
};

// Grid points where the operation throws become empty cells plus a warning;
// structural problems (unknown operation, parameter set mismatch, bad axis)
// throw UsageError.
SweepTable run_sweep(const SweepSpec& spec);

// The axis values run_sweep evaluates at; log axes keep exact endpoints.
std::vector<double> axis_points(const Axis& axis);

struct NamedSpec {
  std::string name;
  std::string description;
  SweepSpec spec;
};

const std::vector<NamedSpec>& figure_presets();
const NamedSpec* find_preset(const std::string& name);

// CSV: '#' provenance lines, then a header row, then one RFC-4180 record per
// table row with floats at 17 significant digits (round-trip exact).
void emit_csv(const SweepTable& table, std::ostream& out);

// One JSON object per row; empty cells serialize as null.
void emit_jsonl(const SweepTable& table, std::ostream& out);

// Parses a spec from JSON with fields mirroring SweepSpec:
//   {"operation": str, "axis": {"parameter", "min", "max", "steps", "scale"},
//    "fixed": {name: value, ...}, "series": {"parameter", "values"}}
// "fixed" and "series" are optional; scale defaults to "linear".
SweepSpec spec_from_json_text(const std::string& text);

// Compact one-line JSON echo of a spec, as embedded in provenance headers.
std::string spec_to_json(const SweepSpec& spec);

}  // namespace dind::sweep
