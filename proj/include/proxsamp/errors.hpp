// Error taxonomy shared by every module. Two broad classes matter for the
// CLI contract: configuration/validation problems exit with code 1, numeric
// and convergence problems exit with code 2.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace proxsamp {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual int exit_code() const noexcept { return 2; }
};

// Bad inputs: preconditions, dimensions, parameter ranges.
class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 1; }
};

// Unknown names, malformed configuration documents.
class ConfigurationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A required capability (gradient, analytic prox) is missing.
class CapabilityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Iteration budget exhausted; carries the last iterate and its residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, std::vector<double> last_iterate,
                   double residual)
      : Error(msg),
        last_iterate_(std::move(last_iterate)),
        residual_(residual) {}
  const std::vector<double>& last_iterate() const noexcept {
    return last_iterate_;
  }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> last_iterate_;
  double residual_;
};

// An internal mathematical contract failed (e.g. acceptance probability > 1).
class ContractViolationError : public Error {
 public:
  using Error::Error;
};

class RunawayRejectionError : public Error {
 public:
  using Error::Error;
};

class DomainTooSmallError : public Error {
 public:
  using Error::Error;
};

class SupportError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Re-thrown wrapper that keeps the original exit code while adding context
// (e.g. the chain index inside a sampler step).
class WrappedError : public Error {
 public:
  WrappedError(int code, const std::string& msg) : Error(msg), code_(code) {}
  int exit_code() const noexcept override { return code_; }

 private:
  int code_;
};

}  // namespace proxsamp
