#pragma once

#include <stdexcept>
#include <string>

namespace brvlab {

// Root of the library's exception hierarchy. The CLI maps each leaf to a
// distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of an operation (non-positive scale, theta
// outside the weight support, empty input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A configuration that would make a closed-form limit formula meaningless:
// unbounded weights, alpha != beta where a standard structure is required,
// alpha <= 1 for expected-shortfall factors, degenerate stopping counts.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

// Quadrature non-convergence, degenerate estimates and other failures of the
// numerical machinery itself.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace brvlab
