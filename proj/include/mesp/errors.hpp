#pragma once

#include <stdexcept>
#include <string>

namespace mesp {

// Bad user input: malformed files, out-of-range parameters, unknown flags.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical precondition violated (matrix not PD, singular, rank too low).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what, double lambda_min = 0.0)
      : std::runtime_error(what), lambda_min(lambda_min) {}
  double lambda_min;
};

// A solver failed to produce a usable result.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The feasible region is empty.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mesp
