#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "dind/models.hpp"

// Inverts the closed-form models for any single parameter by bracketing
// bisection (every model likelihood is monotone in every parameter), and
// reports how far the small-likelihood approximations sit from the exact
// forms they replace.

namespace dind::solvers {

enum class SolveModel { blockade, delay, combined };

// Parameter names follow the models' conventional symbols:
//   blockade: p, n, N
//   delay:    lambda, tau, n, and either N or the trio N_a, T, s
//   combined: p, d, n, N_A
struct SolveRequest {
  SolveModel model = SolveModel::blockade;
  std::string unknown;                  // exactly one parameter name
  double target = 0.0;                  // breach likelihood in (0, 1)
  std::map<std::string, double> fixed;  // every other parameter of the model
  bool integer_constraint = false;      // round counts to the defender-safe side
  bool exact_per_campaign = false;      // combined: exact detection survival
};

// Value of the unknown at which the model's breach likelihood equals the
// target. The search domain is [1e-12, 1e12] (capped at 1 for probabilities);
// the upper bracket grows geometrically from 1 until the target is straddled.
// With integer_constraint, returns the smallest defense count n with
// likelihood(n) <= target, or the largest attack count with
// likelihood(count) <= target.
//
// Throws UsageError for unknown/missing parameter names, std::domain_error
// for out-of-domain values, and std::runtime_error (with the achievable
// likelihood range in the message) when no value in the domain attains the
// target.
double solve(const SolveRequest& request);

struct CurvePoint {
  double attacks = 0.0;   // N
  double defenses = 0.0;  // minimal real-valued n reaching the target
};

// Minimal defense count per attack count, at a fixed target likelihood.
// `hardness_param` is the per-layer failure probability p (blockade) or the
// speed advantage lambda*tau (delay). Attack counts must be positive and
// ascending. Consecutive decades of N add about ln(10)/ln(1/p) defenses for
// blockade and ln(10)/(lambda*tau) for delay.
std::vector<CurvePoint> minimal_defenses_curve(SolveModel model,
                                               double hardness_param,
                                               std::span<const double> attack_counts,
                                               double target_likelihood);

struct RegimeFlag {
  std::string name;    // the condition the approximation leans on
  double value = 0.0;  // its observed value; small means the regime holds
};

// Exact and approximate values side by side. No validity judgment is made;
// the flags carry the observed magnitudes the caller can judge against.
struct ApproxReport {
  std::string quantity;  // what exact/approximate measure
  double exact = 0.0;
  double approximate = 0.0;
  double relative_error = 0.0;  // |approx-exact|/|exact|; NaN when exact == 0
  std::vector<RegimeFlag> regime_flags;
};

// Attack count: target/p^n against ln(1-target)/ln(1-p^n). The relative
// error is bounded by target + p^n when both are small.
ApproxReport attack_count_report(Probability target, Probability layer_failure,
                                 double layers);

// Compensating speedup: the closed small-likelihood form against the exact
// inversion of the time-horizon model for s.
ApproxReport speedup_report(Probability target, double layer_time,
                            double attackers, double horizon,
                            double detection_rate, double layers);

// Viability margin: the likelihood exp(-(n*d/p - ln(N_A))) implied by the
// margin's approximation chain against the full combined likelihood. Flags
// include the margin itself and the per-campaign success b it linearizes.
ApproxReport viability_report(const models::CombinedParams& params);

enum class ApproxKind { attack_count, speedup, viability };

// Name-keyed dispatcher over the three typed reports, for front ends.
// Required keys: attack_count {L,p,n}; speedup {L,tau,N_a,T,lambda,n};
// viability {p,d,n,N_A}.
ApproxReport approximation_report(ApproxKind kind,
                                  const std::map<std::string, double>& params);

}  // namespace dind::solvers
