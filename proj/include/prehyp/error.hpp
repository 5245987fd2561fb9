#pragma once

#include <stdexcept>
#include <string>

namespace prehyp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or hypersurface outside the chart, or a non-positive metric sample.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operands of incompatible rank.
class RankMismatch : public Error {
 public:
  using Error::Error;
};

/// A requested feature the operator does not support (e.g. adjoint with connection).
class UnsupportedFeature : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition failed: CFL violation, singular leading coefficient,
/// missing causal margin, failed hyperbolicity check.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Singular sigma_P on the normal covector: the operator is not prenormally hyperbolic there.
class HyperbolicityViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Malformed or invalid scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace prehyp
