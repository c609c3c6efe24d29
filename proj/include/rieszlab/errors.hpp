#pragma once

#include <stdexcept>
#include <string>

namespace rieszlab {

/// Invalid user input: malformed specs, bad parameters, mismatched shapes.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method ran out of budget before meeting its tolerance.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Poisson integral of the weight does not converge, so the weight has no
/// finite Poisson characteristic.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical invariant that must hold by construction was observed to fail.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace rieszlab
