#pragma once

#include <stdexcept>

namespace fieldconc {

// An argument violates a documented precondition.
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A checked mathematical side condition does not hold for the given inputs.
struct ConditionNotMetError : std::domain_error {
  using std::domain_error::domain_error;
};

// An iterative numeric routine failed to converge.
struct NumericFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fieldconc
