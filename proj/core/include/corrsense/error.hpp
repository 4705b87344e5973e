#pragma once

#include <stdexcept>
#include <string>

namespace corrsense {

// Bad user input: out-of-range parameters, unsupported combinations.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation could not produce a trustworthy number (overflow,
// non-convergent quadrature, indefinite covariance).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace corrsense
