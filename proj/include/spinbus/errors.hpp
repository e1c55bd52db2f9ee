#pragma once

#include <stdexcept>
#include <string>

namespace spinbus {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model parameters or out-of-range arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A basis state whose popcount does not match the sector.
class NotInSector : public Error {
 public:
  using Error::Error;
};

/// Vector length does not match the operator's sector dimension.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Expectation value requested on a state that is not unit-norm.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver (eigen, linear or propagator) failed to reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Degeneracy counting and the total-spin Casimir disagree.
class AmbiguousMultiplet : public Error {
 public:
  using Error::Error;
};

/// The two qubits are decoupled: no effective exchange to drive a transfer.
class NoTransferChannel : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace spinbus
