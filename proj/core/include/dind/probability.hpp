#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dind {

/// Unit-interval scalar. Construction rejects anything outside [0, 1],
/// including NaN, so a Probability in hand is always a valid probability.
class Probability {
 public:
  constexpr Probability() = default;

  explicit Probability(double value, std::string_view name = "probability")
      : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw std::domain_error(std::string(name) + " must lie in [0, 1], got " +
                              std::to_string(value));
    }
  }

  constexpr double value() const { return value_; }
  constexpr double complement() const { return 1.0 - value_; }

  friend constexpr auto operator<=>(Probability, Probability) = default;

 private:
  double value_ = 0.0;
};

}  // namespace dind
