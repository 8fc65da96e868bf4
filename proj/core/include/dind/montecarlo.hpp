#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "dind/models.hpp"

// Stochastic oracles for the closed-form models: each simulator runs the
// attack process directly and estimates the breach probability as a Bernoulli
// proportion. Layer/attack/attacker counts must be integers here; that is
// where the real-valued analytic world meets the discrete process.
//
// Trials are embarrassingly parallel. Every trial draws from its own
// counter-seeded stream (stream = trial index), and aggregation sums integer
// counts only, so a given (config, seed) produces bit-identical estimates at
// any thread count.

namespace dind::mc {

enum class DetectionScope {
  failed_attempts_only,  // a successful break attempt cannot be detected
  all_attempts,          // every attempt risks detection, break or not
};

struct SimConfig {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: use hardware concurrency
  DetectionScope detection_scope = DetectionScope::failed_attempts_only;
};

struct SimEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sqrt(mean*(1-mean)/trials)
  std::uint64_t trials = 0;
  double ci95_low = 0.0;   // mean -/+ 1.96*std_error, clamped to [0, 1]
  double ci95_high = 0.0;
  std::uint64_t successes = 0;
  bool under_resolved = false;  // fewer than 50 successes; ask for more trials
};

// Time-horizon simulation also measures how long attacks actually take, for
// comparison with the tau*exp(lambda*tau)/s the attack-count model assumes.
struct HorizonEstimate {
  SimEstimate estimate;
  double measured_time_per_attack = 0.0;  // over attacks that ran to an end
  std::uint64_t completed_attacks = 0;
  double modeled_time_per_attack = 0.0;   // tau*exp(lambda*tau)/s
};

// Trial: N attacks, each getting past all n layers only if every layer
// independently fails (probability p). Estimates the blockade likelihood.
SimEstimate sim_blockade(const models::BlockadeParams& params,
                         const SimConfig& config);

// Trial: one attack walks n layers, each detecting it with probability
// 1-exp(-lambda*tau). Estimates exp(-lambda*tau*n).
SimEstimate sim_delay_single(const models::DelayParams& params,
                             const SimConfig& config);

// Trial: N_a attackers attack for horizon T at speed factor s (layer
// traversal takes tau/s). A detected attacker restarts from the first layer
// immediately, with every layer restored. Success: someone clears all n
// layers within T.
HorizonEstimate sim_delay_horizon(const models::DelayParams& params,
                                  const SimConfig& config);

// Trial: N_A independent campaigns. A campaign attacks one layer at a time;
// each attempt breaks the layer with probability p (broken layers stay
// broken for that campaign) and is detected with probability d under the
// configured detection scope; detection ends the campaign. Success: all n
// layers broken, never detected.
SimEstimate sim_combined(const models::CombinedParams& params,
                         const SimConfig& config);

// Scenario file support: model name plus its parameter record.
struct SimScenario {
  std::string model;  // blockade | delay_single | delay_horizon | combined
  std::variant<models::BlockadeParams, models::DelayParams,
               models::CombinedParams>
      params;
  SimConfig config;
};

// Parses {"model": ..., "params": {...}, "trials": ..., "seed": ...,
// "detection_scope": ...} from JSON text. Throws UsageError on malformed
// input.
SimScenario scenario_from_json_text(const std::string& text);

}  // namespace dind::mc
