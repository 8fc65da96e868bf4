#include "dind/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dind/errors.hpp"

namespace dind::solvers {

namespace {

constexpr double kDomainLow = 1e-12;
constexpr double kDomainHigh = 1e12;

using ParamMap = std::map<std::string, double>;
using Forward = std::function<double(double)>;  // unknown value -> likelihood

bool is_probability_param(const std::string& name) {
  return name == "p" || name == "d";
}

bool is_count_param(const std::string& name) {
  return name == "n" || name == "N" || name == "N_a" || name == "N_A";
}

double get(const ParamMap& params, const std::string& name) {
  return params.at(name);
}

// Builds the forward likelihood function for the request and reports the
// exact parameter set in use (delay has two accepted shapes).
Forward make_forward(const SolveRequest& request,
                     std::vector<std::string>* param_names) {
  const std::string& unknown = request.unknown;
  std::set<std::string> given;
  for (const auto& [name, value] : request.fixed) given.insert(name);
  given.insert(unknown);

  auto expect = [&](std::initializer_list<const char*> names) {
    std::set<std::string> wanted(names.begin(), names.end());
    if (wanted == given) return true;
    return false;
  };
  auto shape_error = [&](const std::string& wanted) -> UsageError {
    std::ostringstream os;
    os << "model parameters must be exactly {" << wanted << "}; got {";
    bool first = true;
    for (const auto& name : given) {
      if (!first) os << ", ";
      os << name;
      first = false;
    }
    os << "} (unknown: " << unknown << ")";
    return UsageError(os.str());
  };

  auto value_of = [unknown, fixed = request.fixed](const std::string& name,
                                                   double x) {
    return name == unknown ? x : fixed.at(name);
  };

  switch (request.model) {
    case SolveModel::blockade: {
      if (!expect({"p", "n", "N"})) throw shape_error("p, n, N");
      *param_names = {"p", "n", "N"};
      return [value_of](double x) {
        return models::blockade_likelihood(
                   {Probability(value_of("p", x), "p"), value_of("n", x),
                    value_of("N", x)})
            .value();
      };
    }
    case SolveModel::delay: {
      if (expect({"lambda", "tau", "n", "N"})) {
        *param_names = {"lambda", "tau", "n", "N"};
        return [value_of](double x) {
          return models::delay_likelihood(value_of("lambda", x),
                                          value_of("tau", x), value_of("n", x),
                                          value_of("N", x))
              .value();
        };
      }
      if (expect({"lambda", "tau", "n", "N_a", "T", "s"})) {
        *param_names = {"lambda", "tau", "n", "N_a", "T", "s"};
        return [value_of](double x) {
          models::DelayParams params;
          params.detection_rate = value_of("lambda", x);
          params.layer_time = value_of("tau", x);
          params.layers = value_of("n", x);
          params.attackers = value_of("N_a", x);
          params.horizon = value_of("T", x);
          params.speedup = value_of("s", x);
          return models::delay_likelihood_over_time(params).value();
        };
      }
      throw shape_error("lambda, tau, n, N | lambda, tau, n, N_a, T, s");
    }
    case SolveModel::combined: {
      if (!expect({"p", "d", "n", "N_A"})) throw shape_error("p, d, n, N_A");
      *param_names = {"p", "d", "n", "N_A"};
      const bool exact = request.exact_per_campaign;
      return [value_of, exact](double x) {
        models::CombinedParams params{Probability(value_of("p", x), "p"),
                                      Probability(value_of("d", x), "d"),
                                      value_of("n", x), value_of("N_A", x)};
        const Probability per_campaign =
            exact ? models::undetected_success_exact(params)
                  : models::undetected_success_approx(params);
        return models::combined_likelihood(params, per_campaign).value();
      };
    }
  }
  throw std::logic_error("unreachable solve model");
}

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
  bool increasing = false;
};

// Grows the upper bound geometrically from 1 until the target is straddled.
Bracket bracket_target(const Forward& forward, double target, double cap,
                       const std::string& unknown) {
  Bracket b;
  b.lo = kDomainLow;
  b.f_lo = forward(b.lo);
  const double f_cap = forward(cap);
  b.increasing = f_cap >= b.f_lo;

  const double f_min = std::min(b.f_lo, f_cap);
  const double f_max = std::max(b.f_lo, f_cap);
  if (target < f_min || target > f_max) {
    std::ostringstream os;
    os.precision(12);
    os << "no value of " << unknown << " in [" << kDomainLow << ", " << cap
       << "] attains likelihood " << target << "; achievable range is ["
       << f_min << ", " << f_max << "]";
    throw std::runtime_error(os.str());
  }

  b.hi = std::min(1.0, cap);
  b.f_hi = forward(b.hi);
  auto straddles = [&] {
    return b.increasing ? (b.f_lo <= target && target <= b.f_hi)
                        : (b.f_hi <= target && target <= b.f_lo);
  };
  while (!straddles() && b.hi < cap) {
    b.lo = b.hi;
    b.f_lo = b.f_hi;
    b.hi = std::min(b.hi * 2.0, cap);
    b.f_hi = forward(b.hi);
  }
  return b;
}

// Bisection on the geometric midpoint: halves the bracket's log-width each
// step, so the result carries relative (not absolute) precision even for
// roots near the 1e-12 domain edge.
double bisect(const Forward& forward, double target, Bracket b) {
  double mid = std::sqrt(b.lo * b.hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = std::sqrt(b.lo * b.hi);
    const double f_mid = forward(mid);
    if (f_mid == target) return mid;
    const bool go_up = b.increasing ? (f_mid < target) : (f_mid > target);
    if (go_up) {
      b.lo = mid;
    } else {
      b.hi = mid;
    }
    if (b.hi - b.lo <= 1e-13 * mid) break;
  }
  return std::sqrt(b.lo * b.hi);
}

// Defender-safe integer: smallest defense count (likelihood falls with x) or
// largest attack count (likelihood grows with x) whose likelihood stays at or
// below the target.
double round_to_safe_integer(const Forward& forward, double target,
                             double x_real, bool increasing,
                             const std::string& unknown) {
  const double base = std::floor(x_real);
  if (increasing) {
    for (double k = base + 2.0; k >= 1.0; k -= 1.0) {
      if (k <= 0.0) break;
      if (forward(k) <= target) return k;
    }
    return 0.0;  // even a single attack overshoots the target
  }
  for (double k = std::max(base - 1.0, 0.0);; k += 1.0) {
    if (forward(k) <= target) return k;
    if (k > base + 4.0) {
      throw std::runtime_error("integer rounding failed to settle for " +
                               unknown);
    }
  }
}

}  // namespace

double solve(const SolveRequest& request) {
  if (request.unknown.empty()) {
    throw UsageError("solve request needs an unknown parameter name");
  }
  if (request.fixed.count(request.unknown) > 0) {
    throw UsageError("unknown parameter '" + request.unknown +
                     "' also appears in the fixed set");
  }
  if (!(request.target > 0.0 && request.target < 1.0)) {
    throw std::domain_error("target likelihood must lie strictly inside (0, 1)");
  }
  if (request.integer_constraint && !is_count_param(request.unknown)) {
    throw UsageError("integer constraint applies to counts (n, N, N_a, N_A), "
                     "not to '" + request.unknown + "'");
  }

  std::vector<std::string> param_names;
  const Forward forward = make_forward(request, &param_names);

  const double cap =
      is_probability_param(request.unknown) ? 1.0 : kDomainHigh;
  const Bracket bracket =
      bracket_target(forward, request.target, cap, request.unknown);
  const double x_real = bisect(forward, request.target, bracket);

  if (!request.integer_constraint) return x_real;
  return round_to_safe_integer(forward, request.target, x_real,
                               bracket.increasing, request.unknown);
}

std::vector<CurvePoint> minimal_defenses_curve(
    SolveModel model, double hardness_param,
    std::span<const double> attack_counts, double target_likelihood) {
  if (model == SolveModel::combined) {
    throw UsageError("minimal_defenses_curve supports blockade and delay");
  }
  double previous = 0.0;
  for (double count : attack_counts) {
    if (!(count > 0.0) || count <= previous) {
      throw UsageError("attack counts must be positive and ascending");
    }
    previous = count;
  }

  std::vector<CurvePoint> curve;
  curve.reserve(attack_counts.size());
  for (double count : attack_counts) {
    SolveRequest request;
    request.model = model;
    request.unknown = "n";
    request.target = target_likelihood;
    if (model == SolveModel::blockade) {
      request.fixed = {{"p", hardness_param}, {"N", count}};
    } else {
      request.fixed = {{"lambda", hardness_param},
                       {"tau", 1.0},
                       {"N", count}};
    }
    curve.push_back({count, solve(request)});
  }
  return curve;
}

ApproxReport attack_count_report(Probability target, Probability layer_failure,
                                 double layers) {
  ApproxReport report;
  report.quantity = "attacks to reach target likelihood";
  report.exact = models::blockade_attacks_exact(target, layer_failure, layers);
  report.approximate =
      models::blockade_attacks_approx(target, layer_failure, layers);
  report.relative_error =
      std::abs(report.approximate - report.exact) / std::abs(report.exact);
  report.regime_flags = {
      {"L small", target.value()},
      {"p^n small", std::pow(layer_failure.value(), layers)},
  };
  return report;
}

ApproxReport speedup_report(Probability target, double layer_time,
                            double attackers, double horizon,
                            double detection_rate, double layers) {
  ApproxReport report;
  report.quantity = "compensating speed factor";

  // Exact inversion of the time-horizon model for s: the attack count that
  // reaches the target, converted back through N = N_a*T*s*exp(-l*t)/tau.
  const double per_attack =
      models::delay_single_success(detection_rate, layer_time, layers).value();
  const double attacks_needed = std::log1p(-target.value()) /
                                std::log1p(-per_attack);
  report.exact = attacks_needed * layer_time *
                 std::exp(detection_rate * layer_time) / (attackers * horizon);
  report.approximate = models::compensating_speedup(
      target, layer_time, attackers, horizon, detection_rate, layers);
  report.relative_error =
      std::abs(report.approximate - report.exact) / std::abs(report.exact);
  report.regime_flags = {
      {"L small", target.value()},
      {"per-attack success small", per_attack},
  };
  return report;
}

ApproxReport viability_report(const models::CombinedParams& params) {
  ApproxReport report;
  report.quantity = "breach likelihood across campaigns";

  const Probability per_campaign = models::undetected_success_approx(params);
  report.exact = models::combined_likelihood(params, per_campaign).value();

  const double margin =
      models::viability_margin(params.layers, params.detect_prob,
                               params.break_prob, params.campaigns);
  // The margin chain linearizes ln(1-b) ~ -b, (1-p) ~ 1 and ln(1-d) ~ -d,
  // which collapses the likelihood to N_A*b ~ exp(-margin).
  report.approximate = std::exp(-margin);
  report.relative_error = report.exact == 0.0
                              ? std::numeric_limits<double>::quiet_NaN()
                              : std::abs(report.approximate - report.exact) /
                                    std::abs(report.exact);
  report.regime_flags = {
      {"margin", margin},
      {"b small", per_campaign.value()},
      {"L small", report.exact},
      {"p small", params.break_prob.value()},
      {"d small", params.detect_prob.value()},
  };
  return report;
}

ApproxReport approximation_report(ApproxKind kind,
                                  const std::map<std::string, double>& params) {
  auto need = [&](std::initializer_list<const char*> names) {
    std::string missing;
    for (const char* name : names) {
      if (params.find(name) == params.end()) {
        missing += missing.empty() ? name : std::string(", ") + name;
      }
    }
    if (!missing.empty()) {
      throw UsageError("approximation report is missing parameters: " + missing);
    }
    std::string extra;
    for (const auto& [name, value] : params) {
      if (std::find_if(names.begin(), names.end(), [&](const char* want) {
            return name == want;
          }) == names.end()) {
        extra += extra.empty() ? name : ", " + name;
      }
    }
    if (!extra.empty()) {
      throw UsageError("approximation report got unexpected parameters: " +
                       extra);
    }
  };
  switch (kind) {
    case ApproxKind::attack_count:
      need({"L", "p", "n"});
      return attack_count_report(Probability(get(params, "L"), "L"),
                                 Probability(get(params, "p"), "p"),
                                 get(params, "n"));
    case ApproxKind::speedup:
      need({"L", "tau", "N_a", "T", "lambda", "n"});
      return speedup_report(Probability(get(params, "L"), "L"),
                            get(params, "tau"), get(params, "N_a"),
                            get(params, "T"), get(params, "lambda"),
                            get(params, "n"));
    case ApproxKind::viability:
      need({"p", "d", "n", "N_A"});
      return viability_report({Probability(get(params, "p"), "p"),
                               Probability(get(params, "d"), "d"),
                               get(params, "n"), get(params, "N_A")});
  }
  throw std::logic_error("unreachable approximation kind");
}

}  // namespace dind::solvers
