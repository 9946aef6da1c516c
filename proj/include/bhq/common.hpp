#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bhq {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested basis or operator would exceed the configured size limit.
class SizingError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A quantity that only exists past an instability was requested for a
/// stable configuration.
class StabilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The operation is not defined for the lattice geometry at hand.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A perturbative quantity was requested beyond the order that was computed.
class OrderError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or malformed input data.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bhq
