#pragma once

#include <stdexcept>
#include <string>

namespace tdnqs {

/// Base class for failures of the numerical pipeline (ansatz, quadrature, solve).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pole of the complex sigmoid was hit: 1 + e^(-z) vanished.
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The quadrature norm of the wavefunction is zero or not finite.
class ZeroNormError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Condition estimate of the regularized QGT above the hard limit.
class IllConditionedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Error raised inside one Runge-Kutta stage; `stage` is 1-based.
class StageError : public NumericalError {
 public:
  StageError(int stage, const std::string& what)
      : NumericalError("RK4 stage " + std::to_string(stage) + ": " + what), stage_(stage) {}
  int stage() const noexcept { return stage_; }

 private:
  int stage_;
};

}  // namespace tdnqs
