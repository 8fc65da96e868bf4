#include "dind/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dind/errors.hpp"
#include "dind/rng.hpp"

namespace dind::mc {

namespace {

std::uint64_t as_count(double value, const char* name) {
  if (!(value >= 0.0) || value != std::floor(value) || value > 1e15) {
    throw std::invalid_argument(std::string(name) +
                                " must be a nonnegative integer in simulation, got " +
                                std::to_string(value));
  }
  return static_cast<std::uint64_t>(value);
}

struct Counts {
  std::uint64_t successes = 0;
  std::uint64_t attacks = 0;      // delay_horizon only
  std::uint64_t layer_steps = 0;  // delay_horizon only

  void operator+=(const Counts& other) {
    successes += other.successes;
    attacks += other.attacks;
    layer_steps += other.layer_steps;
  }
};

// Runs `trials` independent trials, chunked across threads. Each trial gets
// its own stream keyed by trial index, so the totals do not depend on the
// partition.
template <typename TrialFn>
Counts run_trials(const SimConfig& config, TrialFn&& trial) {
  if (config.trials == 0) {
    throw std::invalid_argument("trials must be >= 1");
  }
  unsigned threads = config.threads;
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, config.trials));

  std::vector<Counts> partial(threads);
  auto worker = [&](unsigned index) {
    const std::uint64_t chunk = (config.trials + threads - 1) / threads;
    const std::uint64_t begin = index * chunk;
    const std::uint64_t end = std::min(begin + chunk, config.trials);
    Counts local;
    for (std::uint64_t i = begin; i < end; ++i) {
      TrialRng rng(config.seed, i);
      trial(rng, local);
    }
    partial[index] = local;
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  Counts total;
  for (const Counts& c : partial) total += c;
  return total;
}

SimEstimate make_estimate(std::uint64_t successes, std::uint64_t trials) {
  SimEstimate est;
  est.successes = successes;
  est.trials = trials;
  est.mean = static_cast<double>(successes) / static_cast<double>(trials);
  est.std_error =
      std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(trials));
  est.ci95_low = std::max(0.0, est.mean - 1.96 * est.std_error);
  est.ci95_high = std::min(1.0, est.mean + 1.96 * est.std_error);
  est.under_resolved = successes < 50;
  return est;
}

}  // namespace

SimEstimate sim_blockade(const models::BlockadeParams& params,
                         const SimConfig& config) {
  params.validate();
  const std::uint64_t layers = as_count(params.layers, "n (layers)");
  const std::uint64_t attacks = as_count(params.attacks, "N (attacks)");
  const double p = params.layer_failure.value();

  const Counts total =
      run_trials(config, [&](TrialRng& rng, Counts& counts) {
        for (std::uint64_t a = 0; a < attacks; ++a) {
          bool breached = true;
          for (std::uint64_t l = 0; l < layers; ++l) {
            if (!rng.bernoulli(p)) {
              breached = false;
              break;
            }
          }
          if (breached) {
            counts.successes++;
            return;
          }
        }
      });
  return make_estimate(total.successes, config.trials);
}

SimEstimate sim_delay_single(const models::DelayParams& params,
                             const SimConfig& config) {
  params.validate();
  const std::uint64_t layers = as_count(params.layers, "n (layers)");
  const double survive =
      std::exp(-params.detection_rate * params.layer_time);

  const Counts total =
      run_trials(config, [&](TrialRng& rng, Counts& counts) {
        for (std::uint64_t l = 0; l < layers; ++l) {
          if (!rng.bernoulli(survive)) return;
        }
        counts.successes++;
      });
  return make_estimate(total.successes, config.trials);
}

HorizonEstimate sim_delay_horizon(const models::DelayParams& params,
                                  const SimConfig& config) {
  params.validate();
  const std::uint64_t layers = as_count(params.layers, "n (layers)");
  const std::uint64_t attackers = as_count(params.attackers, "N_a (attackers)");
  const double survive = std::exp(-params.detection_rate * params.layer_time);
  const double step_time = params.layer_time / params.speedup;
  // Whole layer traversals that fit in the horizon. Detection is resolved at
  // layer boundaries, so time advances in units of tau/s.
  const std::uint64_t step_budget = static_cast<std::uint64_t>(
      std::min(std::floor(params.horizon / step_time + 1e-9), 1e15));

  const Counts total =
      run_trials(config, [&](TrialRng& rng, Counts& counts) {
        bool any_breach = false;
        for (std::uint64_t a = 0; a < attackers; ++a) {
          if (layers == 0) {
            any_breach = true;
            continue;
          }
          std::uint64_t run = 0;
          std::uint64_t attack_steps = 0;
          for (std::uint64_t step = 0; step < step_budget; ++step) {
            ++attack_steps;
            if (rng.bernoulli(survive)) {
              if (++run == layers) {  // full penetration
                counts.attacks++;
                counts.layer_steps += attack_steps;
                any_breach = true;
                break;
              }
            } else {  // detected: attack over, defenses restored
              counts.attacks++;
              counts.layer_steps += attack_steps;
              attack_steps = 0;
              run = 0;
            }
          }
          // An attack cut off by the horizon end is neither a success nor a
          // detection; it does not enter the time-per-attack statistic.
        }
        if (any_breach) counts.successes++;
      });

  HorizonEstimate result;
  result.estimate = make_estimate(total.successes, config.trials);
  result.completed_attacks = total.attacks;
  result.measured_time_per_attack =
      total.attacks == 0 ? 0.0
                         : static_cast<double>(total.layer_steps) /
                               static_cast<double>(total.attacks) * step_time;
  result.modeled_time_per_attack =
      params.layer_time * params.expected_layers_overcome() / params.speedup;
  return result;
}

SimEstimate sim_combined(const models::CombinedParams& params,
                         const SimConfig& config) {
  params.validate();
  const std::uint64_t layers = as_count(params.layers, "n (layers)");
  const std::uint64_t campaigns = as_count(params.campaigns, "N_A (campaigns)");
  const double p = params.break_prob.value();
  const double d = params.detect_prob.value();
  const bool detect_all = config.detection_scope == DetectionScope::all_attempts;

  const Counts total =
      run_trials(config, [&](TrialRng& rng, Counts& counts) {
        for (std::uint64_t c = 0; c < campaigns; ++c) {
          std::uint64_t broken = 0;
          bool detected = false;
          while (broken < layers && !detected) {
            const bool broke = rng.bernoulli(p);
            if ((detect_all || !broke) && rng.bernoulli(d)) {
              detected = true;
              break;
            }
            if (broke) ++broken;
          }
          if (!detected && broken == layers) {
            counts.successes++;
            return;
          }
        }
      });
  return make_estimate(total.successes, config.trials);
}

SimScenario scenario_from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw UsageError(std::string("scenario is not valid JSON: ") + err.what());
  }

  auto number = [&](const nlohmann::json& obj, const char* key,
                    double fallback, bool required) -> double {
    if (!obj.contains(key)) {
      if (required) {
        throw UsageError(std::string("scenario params are missing '") + key +
                         "'");
      }
      return fallback;
    }
    if (!obj[key].is_number()) {
      throw UsageError(std::string("scenario field '") + key +
                       "' must be a number");
    }
    return obj[key].get<double>();
  };

  if (!doc.contains("model") || !doc["model"].is_string()) {
    throw UsageError("scenario needs a string 'model' field");
  }
  if (!doc.contains("params") || !doc["params"].is_object()) {
    throw UsageError("scenario needs an object 'params' field");
  }
  const nlohmann::json& p = doc["params"];

  SimScenario scenario;
  scenario.model = doc["model"].get<std::string>();
  if (scenario.model == "blockade") {
    scenario.params = models::BlockadeParams{
        Probability(number(p, "p", 0, true), "p"),
        number(p, "n", 0, true), number(p, "N", 0, true)};
  } else if (scenario.model == "delay_single" ||
             scenario.model == "delay_horizon") {
    models::DelayParams delay;
    delay.detection_rate = number(p, "lambda", 0, true);
    delay.layer_time = number(p, "tau", 1.0, false);
    delay.layers = number(p, "n", 0, true);
    const bool horizon = scenario.model == "delay_horizon";
    delay.attackers = number(p, "N_a", 0, horizon);
    delay.horizon = number(p, "T", 0, horizon);
    delay.speedup = number(p, "s", 1.0, false);
    scenario.params = delay;
  } else if (scenario.model == "combined") {
    scenario.params = models::CombinedParams{
        Probability(number(p, "p", 0, true), "p"),
        Probability(number(p, "d", 0, true), "d"),
        number(p, "n", 0, true), number(p, "N_A", 0, true)};
  } else {
    throw UsageError("unknown scenario model '" + scenario.model +
                     "' (expected blockade, delay_single, delay_horizon or "
                     "combined)");
  }

  if (doc.contains("trials")) {
    scenario.config.trials = as_count(number(doc, "trials", 0, true), "trials");
  }
  if (doc.contains("seed")) {
    scenario.config.seed = as_count(number(doc, "seed", 0, true), "seed");
  }
  if (doc.contains("detection_scope")) {
    const std::string scope = doc["detection_scope"].get<std::string>();
    if (scope == "failed_attempts_only") {
      scenario.config.detection_scope = DetectionScope::failed_attempts_only;
    } else if (scope == "all_attempts") {
      scenario.config.detection_scope = DetectionScope::all_attempts;
    } else {
      throw UsageError("detection_scope must be 'failed_attempts_only' or "
                       "'all_attempts'");
    }
  }
  return scenario;
}

}  // namespace dind::mc
