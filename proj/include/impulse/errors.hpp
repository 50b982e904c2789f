#pragma once

#include <stdexcept>
#include <string>

namespace impulse {

/// A parameter set or configuration broke one of its invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite numbers reached a numerical kernel.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke a precondition (e.g. jumping from a state that is not on the guard).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace impulse
