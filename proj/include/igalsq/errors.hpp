#pragma once

#include <stdexcept>
#include <string>

namespace igalsq {

// Precondition violated by caller-supplied parameters (bad degree, point
// outside the parametric domain, malformed configuration value, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested degree has no tabulated superconvergent points.
class UnsupportedDegreeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DimensionMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures that originate in floating point computation rather
// than in the inputs' shape.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMapError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankDeficiencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FactorizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, double best_estimate, double residual)
      : NumericalError(what), best_estimate_(best_estimate), residual_(residual) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double residual() const noexcept { return residual_; }

 private:
  double best_estimate_;
  double residual_;
};

class InsufficientDataError : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnknownLawError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ConfigError : public DomainError {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : DomainError("config key '" + key + "': " + message), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace igalsq
