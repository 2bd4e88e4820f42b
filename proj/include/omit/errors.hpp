#pragma once

#include <stdexcept>
#include <string>

namespace omit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters or inputs violate a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A reduced formula was called with a coupling that must be zero.
class PreconditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed input text: JSON, CSV, grid or phase syntax, unknown keys.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Base for failures of the numerics themselves (poles, singular systems, divergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A response denominator vanishes (relative to its natural scale) at this detuning.
class PoleError : public NumericalError {
 public:
  PoleError(const std::string& what, double delta) : NumericalError(what), delta_(delta) {}
  double delta() const noexcept { return delta_; }

 private:
  double delta_;
};

/// The sideband matrix is singular or too ill-conditioned to trust.
class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, double delta, double condition)
      : NumericalError(what), delta_(delta), condition_(condition) {}
  double delta() const noexcept { return delta_; }
  double condition() const noexcept { return condition_; }

 private:
  double delta_;
  double condition_;
};

/// Time-domain integration did not settle to a stationary Fourier coefficient.
class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace omit
