#pragma once
// Exception taxonomy. Every failure that crosses a module boundary is one of
// these; the CLI maps them onto exit codes.

#include <stdexcept>
#include <string>

namespace mppv {

// Base class so callers can catch everything thrown by this library at once.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid arguments or malformed inputs detected up front: bad parameters,
// unsorted grids, queries past the horizon, maps applied outside their domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An algorithm failed to deliver its accuracy contract (quadrature budget
// exhausted, extrapolation not settling, runaway event generation).
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what) {}
  NumericError(const std::string& what, double value, double error_estimate,
               int intervals)
      : Error(what),
        value(value),
        error_estimate(error_estimate),
        intervals(intervals) {}

  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
};

// A regularity condition required of a scenario does not hold (rate limit not
// positive, rate map not injective, declared dominating function violated).
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

// The operation is not defined for this variant (density of an atom law,
// inverting a map that was registered without an inverse).
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

// Scenario configuration is malformed: unknown keys, wrong types, missing
// required fields, values outside their documented ranges.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mppv
