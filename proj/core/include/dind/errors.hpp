#pragma once

#include <stdexcept>

namespace dind {

/// Structural misuse of an interface: wrong or missing parameter names,
/// unknown operation, malformed scenario. Distinct from std::domain_error
/// (valid request, out-of-domain value) so front ends can map the two to
/// different exit codes.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace dind
