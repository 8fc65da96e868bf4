#include "dind/ops.hpp"

#include <cmath>
#include <sstream>

#include "dind/errors.hpp"
#include "dind/models.hpp"
#include "dind/solvers.hpp"

namespace dind::ops {
namespace {

double get(const ParamMap& a, const char* name) { return a.at(name); }

models::CombinedParams combined_from(const ParamMap& a, double campaigns) {
  models::CombinedParams p;
  p.break_prob = Probability(get(a, "p"), "p");
  p.detect_prob = Probability(get(a, "d"), "d");
  p.layers = get(a, "n");
  p.campaigns = campaigns;
  return p;
}

double solve_min_defenses(solvers::SolveModel model, const ParamMap& fixed,
                          double target) {
  solvers::SolveRequest req;
  req.model = model;
  req.unknown = "n";
  req.target = target;
  req.fixed = fixed;
  req.integer_constraint = true;
  return solvers::solve(req);
}

// Attacks needed for the delay model to reach likelihood L, from
// L = 1 - (1 - q)^N with q the single-attack success probability.
double delay_attacks_exact(const ParamMap& a) {
  const double target = get(a, "L");
  if (!(target > 0.0 && target < 1.0)) {
    throw std::domain_error("L must lie in (0, 1) to solve for attacks");
  }
  const double q = models::delay_single_success(get(a, "lambda"), get(a, "tau"),
                                                get(a, "n"))
                       .value();
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("single-attack success must lie in (0, 1)");
  }
  return std::log1p(-target) / std::log1p(-q);
}

std::vector<OpInfo> build_registry() {
  std::vector<OpInfo> ops;
  auto add = [&ops](std::string name, std::vector<std::string> params,
                    std::string summary,
                    std::function<double(const ParamMap&)> fn) {
    ops.push_back({std::move(name), std::move(params), std::move(summary),
                   std::move(fn)});
  };

  add("blockade_likelihood", {"p", "n", "N"},
      "breach likelihood of n blocking layers under N attacks",
      [](const ParamMap& a) {
        return models::blockade_likelihood(
                   {Probability(get(a, "p"), "p"), get(a, "n"), get(a, "N")})
            .value();
      });
  add("blockade_attacks_exact", {"L", "p", "n"},
      "attacks needed to reach likelihood L against n blocking layers",
      [](const ParamMap& a) {
        return models::blockade_attacks_exact(Probability(get(a, "L"), "L"),
                                              Probability(get(a, "p"), "p"),
                                              get(a, "n"));
      });
  add("blockade_attacks_approx", {"L", "p", "n"},
      "small-likelihood approximation of blockade_attacks_exact",
      [](const ParamMap& a) {
        return models::blockade_attacks_approx(Probability(get(a, "L"), "L"),
                                               Probability(get(a, "p"), "p"),
                                               get(a, "n"));
      });
  add("blockade_hardness", {"L", "N", "n"},
      "per-layer failure probability that keeps N attacks below likelihood L",
      [](const ParamMap& a) {
        return models::blockade_hardness(Probability(get(a, "L"), "L"),
                                         get(a, "N"), get(a, "n"))
            .value();
      });
  add("blockade_min_defenses", {"L", "p", "N"},
      "smallest layer count keeping N attacks at or below likelihood L",
      [](const ParamMap& a) {
        return solve_min_defenses(solvers::SolveModel::blockade,
                                  {{"p", get(a, "p")}, {"N", get(a, "N")}},
                                  get(a, "L"));
      });

  add("delay_single_success", {"lambda", "tau", "n"},
      "chance one attack crosses n delay layers undetected",
      [](const ParamMap& a) {
        return models::delay_single_success(get(a, "lambda"), get(a, "tau"),
                                            get(a, "n"))
            .value();
      });
  add("delay_likelihood", {"lambda", "tau", "n", "N"},
      "breach likelihood of n delay layers under N attacks",
      [](const ParamMap& a) {
        return models::delay_likelihood(get(a, "lambda"), get(a, "tau"),
                                        get(a, "n"), get(a, "N"))
            .value();
      });
  add("delay_attack_count", {"N_a", "T", "s", "lambda", "tau"},
      "attacks N_a attackers complete in horizon T at speedup s",
      [](const ParamMap& a) {
        return models::delay_attack_count(get(a, "N_a"), get(a, "T"),
                                          get(a, "s"), get(a, "lambda"),
                                          get(a, "tau"));
      });
  add("delay_likelihood_over_time", {"lambda", "tau", "n", "N_a", "T", "s"},
      "delay-model breach likelihood for an attacker population over time",
      [](const ParamMap& a) {
        models::DelayParams p;
        p.detection_rate = get(a, "lambda");
        p.layer_time = get(a, "tau");
        p.layers = get(a, "n");
        p.attackers = get(a, "N_a");
        p.horizon = get(a, "T");
        p.speedup = get(a, "s");
        return models::delay_likelihood_over_time(p).value();
      });
  add("delay_attacks_exact", {"L", "lambda", "tau", "n"},
      "attacks needed to reach likelihood L against n delay layers",
      delay_attacks_exact);
  add("delay_min_defenses", {"L", "lambda", "tau", "N"},
      "smallest delay-layer count keeping N attacks at or below likelihood L",
      [](const ParamMap& a) {
        return solve_min_defenses(solvers::SolveModel::delay,
                                  {{"lambda", get(a, "lambda")},
                                   {"tau", get(a, "tau")},
                                   {"N", get(a, "N")}},
                                  get(a, "L"));
      });
  add("delay_min_defenses_horizon", {"L", "lambda", "tau", "N_a", "T", "s"},
      "smallest delay-layer count for an attacker population over a horizon",
      [](const ParamMap& a) {
        return solve_min_defenses(solvers::SolveModel::delay,
                                  {{"lambda", get(a, "lambda")},
                                   {"tau", get(a, "tau")},
                                   {"N_a", get(a, "N_a")},
                                   {"T", get(a, "T")},
                                   {"s", get(a, "s")}},
                                  get(a, "L"));
      });
  add("compensating_speedup", {"L", "tau", "N_a", "T", "lambda", "n"},
      "speedup that holds breach likelihood at L as layers are added",
      [](const ParamMap& a) {
        return models::compensating_speedup(Probability(get(a, "L"), "L"),
                                            get(a, "tau"), get(a, "N_a"),
                                            get(a, "T"), get(a, "lambda"),
                                            get(a, "n"));
      });

  add("expected_attempts", {"n", "p"},
      "expected failed attempts before n layers are broken",
      [](const ParamMap& a) {
        return models::expected_attempts(get(a, "n"),
                                         Probability(get(a, "p"), "p"));
      });
  add("undetected_success_approx", {"p", "d", "n"},
      "campaign success chance, detection applied to the mean attempt count",
      [](const ParamMap& a) {
        return models::undetected_success_approx(combined_from(a, 1.0)).value();
      });
  add("undetected_success_exact", {"p", "d", "n"},
      "campaign success chance, detection weighted over the attempt "
      "distribution",
      [](const ParamMap& a) {
        return models::undetected_success_exact(combined_from(a, 1.0)).value();
      });
  add("combined_likelihood_approx", {"p", "d", "n", "N_A"},
      "breach likelihood across N_A campaigns, approximate per-campaign term",
      [](const ParamMap& a) {
        const auto params = combined_from(a, get(a, "N_A"));
        return models::combined_likelihood(
                   params, models::undetected_success_approx(params))
            .value();
      });
  add("combined_likelihood_exact", {"p", "d", "n", "N_A"},
      "breach likelihood across N_A campaigns, exact per-campaign term",
      [](const ParamMap& a) {
        const auto params = combined_from(a, get(a, "N_A"));
        return models::combined_likelihood(
                   params, models::undetected_success_exact(params))
            .value();
      });
  add("viability_margin", {"n", "d", "p", "N_A"},
      "log-scale margin by which campaigns fall short of a likely breach",
      [](const ParamMap& a) {
        return models::viability_margin(get(a, "n"),
                                        Probability(get(a, "d"), "d"),
                                        Probability(get(a, "p"), "p"),
                                        get(a, "N_A"));
      });
  return ops;
}

}  // namespace

const std::vector<OpInfo>& registry() {
  static const std::vector<OpInfo> ops = build_registry();
  return ops;
}

const OpInfo* find(std::string_view name) {
  for (const OpInfo& op : registry()) {
    if (op.name == name) return &op;
  }
  return nullptr;
}

double evaluate(const OpInfo& op, const ParamMap& args) {
  std::vector<std::string> missing;
  for (const std::string& p : op.params) {
    if (args.find(p) == args.end()) missing.push_back(p);
  }
  std::vector<std::string> unexpected;
  for (const auto& [name, value] : args) {
    (void)value;
    bool known = false;
    for (const std::string& p : op.params) {
      if (p == name) known = true;
    }
    if (!known) unexpected.push_back(name);
  }
  if (!missing.empty() || !unexpected.empty()) {
    std::ostringstream msg;
    msg << op.name << " takes {";
    for (size_t i = 0; i < op.params.size(); ++i) {
      msg << (i ? ", " : "") << op.params[i];
    }
    msg << "}";
    if (!missing.empty()) {
      msg << "; missing";
      for (const std::string& m : missing) msg << " " << m;
    }
    if (!unexpected.empty()) {
      msg << "; unexpected";
      for (const std::string& u : unexpected) msg << " " << u;
    }
    throw UsageError(msg.str());
  }
  return op.eval(args);
}

double evaluate(std::string_view name, const ParamMap& args) {
  const OpInfo* op = find(name);
  if (op == nullptr) {
    throw UsageError("unknown operation \"" + std::string(name) + "\"");
  }
  return evaluate(*op, args);
}

}  // namespace dind::ops
