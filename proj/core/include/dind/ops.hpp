#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

// Name-keyed registry of every scalar operation the toolkit can evaluate,
// used by the sweep grid evaluator and the command line. Parameters travel
// as a name -> value map with the models' conventional symbols (p, d, n, N,
// N_a, N_A, L, lambda, tau, T, s).

namespace dind::ops {

using ParamMap = std::map<std::string, double>;

struct OpInfo {
  std::string name;
  std::vector<std::string> params;  // required names, in documentation order
  std::string summary;
  std::function<double(const ParamMap&)> eval;
};

const std::vector<OpInfo>& registry();

// Null when the name is not registered.
const OpInfo* find(std::string_view name);

// Evaluates after checking the argument set matches exactly; throws
// UsageError listing missing and unexpected names otherwise.
double evaluate(const OpInfo& op, const ParamMap& args);
double evaluate(std::string_view name, const ParamMap& args);

}  // namespace dind::ops
