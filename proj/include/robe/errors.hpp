#pragma once

#include <stdexcept>
#include <string>

namespace robe {

/// Rejected construction arguments (out-of-range parameters, bad grid sizes).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for every failure of a numerical procedure on valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ToleranceNotMet : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonRealResult : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationNotConverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TotalMultiplicityViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoTransitionFound : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientSamples : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A per-eccentricity failure during curve tracing; keeps the offending e.
class TraceFailure : public NumericalError {
 public:
  TraceFailure(double e, const std::string& what)
      : NumericalError("at e=" + std::to_string(e) + ": " + what), e_(e) {}

  double eccentricity() const noexcept { return e_; }

 private:
  double e_;
};

}  // namespace robe
