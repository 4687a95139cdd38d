#pragma once

#include <stdexcept>
#include <string>

namespace gpsup {

/// Base for every error raised by the library. `exit_code()` is the process
/// status the command-line runner maps the error to.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 3; }
};

/// Invalid configuration or argument. `field()` names the offending setting
/// (dotted path such as "experiment.u_values") when one is known.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  explicit ConfigError(const std::string& what) : ConfigError(std::string{}, what) {}

  const std::string& field() const noexcept { return field_; }
  int exit_code() const noexcept override { return 2; }

 private:
  std::string field_;
};

/// An operation was called on a horizon of the wrong heaviness regime.
class RegimeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A required input (typically a Pickands constant) is not available.
class DependencyError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Numeric failure: quadrature non-convergence, invalid evaluation domain.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Tabulated function queried outside its knots.
class OutOfRangeError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Circulant embedding has too much negative spectral mass.
class EmbeddingError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Requested path exceeds the configured memory budget.
class BudgetError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace gpsup
