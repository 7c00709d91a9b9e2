#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace iew {

/// Root of all errors raised by the workbench.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument: bad bounds, counts, or shapes.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// An operation was configured inconsistently (e.g. singular kernel without correction).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition on the operator does not hold.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Evaluation point outside the domain of definition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise unusable input samples.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Resolvent parameter sits on a characteristic value with a nonzero resonant component.
class ResonanceError : public Error {
 public:
  ResonanceError(const std::string& what, double characteristic_value)
      : Error(what), characteristic_value_(characteristic_value) {}
  double characteristic_value() const { return characteristic_value_; }

 private:
  double characteristic_value_;
};

/// The sampling grid is too coarse to track an argument or branch.
class RefineGridError : public Error {
 public:
  using Error::Error;
};

/// Winding-number computation is ill-posed because the symbol nearly vanishes.
class IllPosedIndexError : public Error {
 public:
  using Error::Error;
};

/// A discrete linear system could not be solved reliably.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Half-line convolution equation with nonzero index.
class NonzeroIndexError : public Error {
 public:
  NonzeroIndexError(const std::string& what, int kappa) : Error(what), kappa_(kappa) {}
  int kappa() const { return kappa_; }

 private:
  int kappa_;
};

/// Fixed-point map observed to expand.
class NotContractionError : public Error {
 public:
  using Error::Error;
};

/// Continuation failed at an intermediate parameter value.
class PathFailureError : public Error {
 public:
  PathFailureError(const std::string& what, double lambda) : Error(what), lambda_(lambda) {}
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

/// Small-body asymptotics requested outside ka << 1.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// Particle density cannot be realised with the requested spacing.
class InfeasibleDensityError : public Error {
 public:
  using Error::Error;
};

/// Range of eigenvalues unsuitable for a power-law fit.
class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace iew
