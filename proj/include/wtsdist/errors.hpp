#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wtsdist {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `position` is a byte offset when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at byte " + std::to_string(position)),
        position_(position) {}
  explicit ParseError(const std::string& what)
      : Error(what), position_(std::string::npos) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Well-formed input that violates a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A trace metric was applied to inputs it is not defined on.
class MetricError : public Error {
 public:
  using Error::Error;
};

/// A strategy proposed a transition that does not leave the current endpoint.
class StrategyViolation : public Error {
 public:
  using Error::Error;
};

/// Oracle search exceeded its node budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// The metric has no recursive iterator (limit-average).
class UnsupportedMetric : public Error {
 public:
  using Error::Error;
};

/// Fixed-point iteration ran out of sweeps.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace wtsdist
