#pragma once

#include <stdexcept>
#include <string>

namespace greenprop {

// Bad input values, malformed configuration, or violated preconditions.
// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Evaluation failed for numerical reasons: pole or caustic proximity,
// near-eigenvalue Wronskian collapse, overflow, mode-integration blow-up.
// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative or quadrature scheme could not reach its accuracy target
// (node-doubling stalled, series diverges in the requested regime, ...).
// The CLI maps this to exit code 4.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace greenprop
