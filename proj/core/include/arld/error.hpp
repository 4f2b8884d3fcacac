#pragma once

#include <stdexcept>
#include <string>

namespace arld {

/// Raised when a caller breaks an operation's precondition (shape mismatch,
/// stepping a finished episode, unknown replay id, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace arld
