#pragma once

#include <span>

#include "dind/probability.hpp"

// Closed-form breach-likelihood models for three layered-defense strategies:
//
//   blockade  -- every attack must get past all n layers in one shot; a layer
//                fails an attack independently with probability p.
//   delay     -- layers only buy time; an attacker traversing a layer for
//                time tau is detected at rate lambda, so it survives a layer
//                with probability exp(-lambda*tau).
//   combined  -- a learning attacker needs a geometric number of attempts to
//                break each layer, keeps broken layers broken, and risks
//                detection (probability d) on every attempt.
//
// All likelihoods of the shape 1-(1-x)^N are evaluated through log1p/expm1 so
// that values near 0 and near 1 keep relative precision down to x ~ 1e-300.
// Layer and attack counts are real-valued here; integer constraints belong to
// the simulation layer (see montecarlo.hpp).

namespace dind::models {

struct BlockadeParams {
  Probability layer_failure;  // p: one layer fails or is irrelevant
  double layers = 0.0;        // n
  double attacks = 0.0;       // N

  void validate() const;
};

struct DelayParams {
  double detection_rate = 0.0;  // lambda, detections per unit time per layer
  double layer_time = 1.0;      // tau, time to overcome one layer (> 0)
  double layers = 0.0;          // n
  double attacks = 0.0;         // N, used by the fixed-attack-count form
  double attackers = 0.0;       // N_a, used by the time-horizon form
  double horizon = 0.0;         // T
  double speedup = 1.0;         // s, common speed factor for both sides (> 0)

  // lambda*tau, dimensionless; > 1 means detection typically beats traversal.
  double speed_advantage() const { return detection_rate * layer_time; }
  // Layers an attack is expected to get through, as used by the attack-count
  // model. The simulator measures the empirical value for comparison.
  double expected_layers_overcome() const;

  void validate() const;
};

struct CombinedParams {
  Probability break_prob;   // p: one attempt breaks the layer (> 0)
  Probability detect_prob;  // d: one attempt is detected
  double layers = 0.0;      // n
  double campaigns = 0.0;   // N_A: independent attacker campaigns

  double undetected() const { return detect_prob.complement(); }  // u = 1-d

  void validate() const;
};

// ---- Blockade -------------------------------------------------------------

// Likelihood that at least one of N attacks gets past all n layers:
// 1-(1-p^n)^N.
Probability blockade_likelihood(const BlockadeParams& params);

// Attacks needed to reach breach likelihood `target`:
// ln(1-target)/ln(1-p^n). Rejects target or layer_failure in {0,1}.
double blockade_attacks_exact(Probability target, Probability layer_failure,
                              double layers);

// Small-likelihood approximation of the above: target/p^n. No validity
// checks; see solvers::attack_count_report for the error analysis.
double blockade_attacks_approx(Probability target, Probability layer_failure,
                               double layers);

// Per-layer failure probability that holds the breach likelihood at `target`
// under `attacks` attacks and `layers` layers: (1-(1-target)^(1/N))^(1/n).
Probability blockade_hardness(Probability target, double attacks,
                              double layers);

// ---- Delay ----------------------------------------------------------------

// One attack survives every layer undetected: exp(-lambda*tau*n).
Probability delay_single_success(double detection_rate, double layer_time,
                                 double layers);

// At least one of N attacks survives: 1-(1-exp(-lambda*tau*n))^N.
Probability delay_likelihood(double detection_rate, double layer_time,
                             double layers, double attacks);

// Attacks N_a attackers fit into horizon T at speed factor s, assuming the
// modeled time per attack tau*exp(lambda*tau)/s: N_a*T*s*exp(-lambda*tau)/tau.
double delay_attack_count(double attackers, double horizon, double speedup,
                          double detection_rate, double layer_time);

// Breach likelihood over the horizon: delay_likelihood composed with
// delay_attack_count.
Probability delay_likelihood_over_time(const DelayParams& params);

// Speed factor that drives the horizon model to breach likelihood `target`
// when both sides speed up together, in its small-likelihood form:
// (target*tau/(N_a*T))*exp(lambda*tau*(n+1)).
double compensating_speedup(Probability target, double layer_time,
                            double attackers, double horizon,
                            double detection_rate, double layers);

// ---- Combined (learning attacker) -----------------------------------------

// Expected failed attempts for one campaign to break all n layers when each
// attempt breaks a layer with probability p: n*(1-p)/p.
double expected_attempts(double layers, Probability break_prob);

// Same, with one probability per layer: sum of (1-p_i)/p_i. Always at least
// the uniform value at the mean p (convexity).
double expected_attempts_mixed(std::span<const Probability> break_probs);

// Campaign survives detection through the *expected* number of failed
// attempts: u^(n*(1-p)/p). Replaces E[u^K] by u^E[K], so it understates the
// attacker's odds; the exact form below is always >= this one.
Probability undetected_success_approx(const CombinedParams& params);

// Exact campaign success probability when only failed attempts risk
// detection: per layer E[u^K] = p/(p + d*(1-p)) for the geometric failure
// count K, raised to the n-th power.
Probability undetected_success_exact(const CombinedParams& params);

// At least one of N_A campaigns succeeds: 1-(1-per_campaign)^N_A.
// `per_campaign` comes from either undetected_success_* variant.
Probability combined_likelihood(const CombinedParams& params,
                                Probability per_campaign);

// Viability margin n*d/p - ln(N_A). Positive by a few means the layered
// defense holds against N_A campaigns; see solvers::viability_report for how
// it relates to the exact likelihood.
double viability_margin(double layers, Probability detect_prob,
                        Probability break_prob, double campaigns);

}  // namespace dind::models
