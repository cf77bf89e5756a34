#pragma once

#include <stdexcept>
#include <string>

namespace photocorr {

/// Invalid argument or precondition violation (bad dimension, out-of-range rate, unknown name).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested moment order does not fit inside the Fock truncation.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Steady-state solve failed: degenerate null space or residual above tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int null_space_dimension, double residual);

  int null_space_dimension() const noexcept { return null_space_dimension_; }
  double residual() const noexcept { return residual_; }

 private:
  int null_space_dimension_;
  double residual_;
};

/// Trajectory integration failed (norm drift, ill-conditioned propagator, runaway bracketing).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too little data for a click-record estimator.
class StatisticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace photocorr
