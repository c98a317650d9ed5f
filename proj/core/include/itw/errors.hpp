#pragma once

#include <stdexcept>
#include <string>

namespace itw {

/// Scenario/config input that cannot be used at all (unparseable file,
/// unknown keys, missing keys). Validation findings of a parseable config
/// are reported through ValidationIssue lists instead.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Coarsening factor does not divide the number of steps.
class FactorMismatchError : public std::runtime_error {
 public:
  explicit FactorMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// Coefficient schedule is not aligned with the grid it is evaluated on.
class ScheduleMismatchError : public std::runtime_error {
 public:
  explicit ScheduleMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// Trajectories or field states fed to the ledger were built from
/// different noise realizations.
class NoiseMismatchError : public std::runtime_error {
 public:
  explicit NoiseMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// Integrand returned a non-finite value on a quadrature node.
class QuadratureOverflowError : public std::runtime_error {
 public:
  explicit QuadratureOverflowError(const std::string& what) : std::runtime_error(what) {}
};

/// State left the configured excursion box of a field with unbounded basis
/// functions.
class StateExcursionError : public std::runtime_error {
 public:
  explicit StateExcursionError(const std::string& what) : std::runtime_error(what) {}
};

/// A sampled mark produced a jump larger than the declared sup bound.
class JumpBoundError : public std::runtime_error {
 public:
  explicit JumpBoundError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace itw
