#include "dind/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dind::models {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

void require_finite_nonneg(double v, const char* name) {
  if (!(v >= 0.0) || std::isinf(v)) {
    throw std::domain_error(std::string(name) + " must be finite and >= 0, got " +
                            std::to_string(v));
  }
}

// p^n with the conventions 0^0 = 1 and 0^positive = 0.
double pow_pn(double base, double exponent) {
  if (exponent == 0.0) return 1.0;
  return std::pow(base, exponent);
}

// 1-(1-x)^count for x in [0,1], count >= 0, without cancellation at either end.
// count == 1 returns x itself, so single-attack forms reduce bitwise.
double at_least_one(double x, double count) {
  if (count == 0.0 || x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (count == 1.0) return x;
  return -std::expm1(count * std::log1p(-x));
}

void require_open_unit(Probability v, const char* name) {
  if (v.value() == 0.0 || v.value() == 1.0) {
    throw std::domain_error(std::string(name) +
                            " must lie strictly inside (0, 1), got " +
                            std::to_string(v.value()));
  }
}

}  // namespace

void BlockadeParams::validate() const {
  require_finite_nonneg(layers, "n (layers)");
  require_finite_nonneg(attacks, "N (attacks)");
}

double DelayParams::expected_layers_overcome() const {
  return std::exp(detection_rate * layer_time);
}

void DelayParams::validate() const {
  require_finite_nonneg(detection_rate, "lambda (detection rate)");
  require(layer_time > 0.0 && std::isfinite(layer_time),
          "tau (layer time) must be finite and > 0");
  require_finite_nonneg(layers, "n (layers)");
  require_finite_nonneg(attacks, "N (attacks)");
  require_finite_nonneg(attackers, "N_a (attackers)");
  require_finite_nonneg(horizon, "T (horizon)");
  require(speedup > 0.0 && std::isfinite(speedup),
          "s (speed factor) must be finite and > 0");
}

void CombinedParams::validate() const {
  require(break_prob.value() > 0.0, "p (break probability) must be > 0");
  require_finite_nonneg(layers, "n (layers)");
  require_finite_nonneg(campaigns, "N_A (campaigns)");
}

Probability blockade_likelihood(const BlockadeParams& params) {
  params.validate();
  const double per_attack = pow_pn(params.layer_failure.value(), params.layers);
  return Probability(at_least_one(per_attack, params.attacks));
}

double blockade_attacks_exact(Probability target, Probability layer_failure,
                              double layers) {
  require_open_unit(target, "L (target likelihood)");
  require_open_unit(layer_failure, "p (layer failure)");
  require(layers > 0.0, "n (layers) must be > 0");
  const double per_attack = pow_pn(layer_failure.value(), layers);
  return std::log1p(-target.value()) / std::log1p(-per_attack);
}

double blockade_attacks_approx(Probability target, Probability layer_failure,
                               double layers) {
  return target.value() / pow_pn(layer_failure.value(), layers);
}

Probability blockade_hardness(Probability target, double attacks,
                              double layers) {
  require_open_unit(target, "L (target likelihood)");
  require(attacks >= 1.0, "N (attacks) must be >= 1");
  require(layers >= 1.0, "n (layers) must be >= 1");
  // (1-(1-L)^(1/N))^(1/n), inner factor kept in log space end to end.
  const double per_attack = -std::expm1(std::log1p(-target.value()) / attacks);
  return Probability(std::exp(std::log(per_attack) / layers));
}

Probability delay_single_success(double detection_rate, double layer_time,
                                 double layers) {
  require_finite_nonneg(detection_rate, "lambda (detection rate)");
  require(layer_time > 0.0, "tau (layer time) must be > 0");
  require_finite_nonneg(layers, "n (layers)");
  return Probability(std::exp(-detection_rate * layer_time * layers));
}

Probability delay_likelihood(double detection_rate, double layer_time,
                             double layers, double attacks) {
  const double per_attack =
      delay_single_success(detection_rate, layer_time, layers).value();
  require_finite_nonneg(attacks, "N (attacks)");
  return Probability(at_least_one(per_attack, attacks));
}

double delay_attack_count(double attackers, double horizon, double speedup,
                          double detection_rate, double layer_time) {
  require_finite_nonneg(attackers, "N_a (attackers)");
  require_finite_nonneg(horizon, "T (horizon)");
  require_finite_nonneg(speedup, "s (speed factor)");
  require_finite_nonneg(detection_rate, "lambda (detection rate)");
  require(layer_time > 0.0, "tau (layer time) must be > 0");
  return attackers * horizon * speedup *
         std::exp(-detection_rate * layer_time) / layer_time;
}

Probability delay_likelihood_over_time(const DelayParams& params) {
  params.validate();
  const double attacks =
      delay_attack_count(params.attackers, params.horizon, params.speedup,
                         params.detection_rate, params.layer_time);
  return delay_likelihood(params.detection_rate, params.layer_time,
                          params.layers, attacks);
}

double compensating_speedup(Probability target, double layer_time,
                            double attackers, double horizon,
                            double detection_rate, double layers) {
  return (target.value() * layer_time / (attackers * horizon)) *
         std::exp(detection_rate * layer_time * (layers + 1.0));
}

double expected_attempts(double layers, Probability break_prob) {
  require(break_prob.value() > 0.0, "p (break probability) must be > 0");
  require_finite_nonneg(layers, "n (layers)");
  return layers * break_prob.complement() / break_prob.value();
}

double expected_attempts_mixed(std::span<const Probability> break_probs) {
  double total = 0.0;
  for (std::size_t i = 0; i < break_probs.size(); ++i) {
    const Probability p = break_probs[i];
    if (p.value() == 0.0) {
      throw std::domain_error("p[" + std::to_string(i) +
                              "] (break probability) must be > 0");
    }
    total += p.complement() / p.value();
  }
  return total;
}

Probability undetected_success_approx(const CombinedParams& params) {
  params.validate();
  const double failed_attempts =
      expected_attempts(params.layers, params.break_prob);
  if (failed_attempts == 0.0) return Probability(1.0);
  const double undetected = params.undetected();
  if (undetected == 0.0) return Probability(0.0);
  return Probability(std::exp(failed_attempts * std::log(undetected)));
}

Probability undetected_success_exact(const CombinedParams& params) {
  params.validate();
  const double p = params.break_prob.value();
  const double d = params.detect_prob.value();
  // Per layer, E[u^K] for K ~ Geometric(p) failures:
  // sum_k p*((1-p)*u)^k = p/(1-(1-p)*u). The denominator rewritten as
  // p + d*(1-p) avoids cancellation and is zero only when p = 0 and d = 0.
  const double denom = p + d * (1.0 - p);
  if (denom == 0.0) {
    throw std::domain_error(
        "p and d cannot both be 0 (campaign never ends)");
  }
  const double per_layer = p / denom;
  if (per_layer == 1.0 || params.layers == 0.0) return Probability(1.0);
  return Probability(std::exp(params.layers * std::log(per_layer)));
}

Probability combined_likelihood(const CombinedParams& params,
                                Probability per_campaign) {
  params.validate();
  return Probability(at_least_one(per_campaign.value(), params.campaigns));
}

double viability_margin(double layers, Probability detect_prob,
                        Probability break_prob, double campaigns) {
  require(break_prob.value() > 0.0, "p (break probability) must be > 0");
  require(campaigns >= 1.0, "N_A (campaigns) must be >= 1");
  require_finite_nonneg(layers, "n (layers)");
  return layers * detect_prob.value() / break_prob.value() -
         std::log(campaigns);
}

}  // namespace dind::models
