#pragma once

#include <stdexcept>
#include <string>

namespace nmchain {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, scenario, or argument.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An operation received an amplitude trajectory in the wrong gauge.
class FrameMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A numerical solver failed (step-size collapse, convergence gate, aliasing).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A matrix that should be a density operator has a significantly
/// negative eigenvalue, or a distance bracket went negative.
class InvalidDensity : public Error {
 public:
  using Error::Error;
};

/// Half-life calibration could not bracket or reach its target.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace nmchain
