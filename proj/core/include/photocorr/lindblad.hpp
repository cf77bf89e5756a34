#pragma once

// Liouvillian of the driven, damped JC master equation and its steady state.
//
// Density matrices are vectorized by column stacking: vec(rho)[i + d*j] = rho(i, j),
// so vec(A rho B) = (B^T kron A) vec(rho).

#include <span>
#include <string_view>
#include <vector>

#include "photocorr/hilbert.hpp"
#include "photocorr/jc_model.hpp"

namespace photocorr {

enum class Channel { cavity, qubit };

std::string_view channel_name(Channel c);

/// Collapse operator of one photodetection channel.
struct JumpOperator {
  Channel channel;
  Operator op;
};

/// sqrt(2 kappa) a (cavity output) and sqrt(gamma) s- (qubit emission). Zero-rate channels are omitted.
std::vector<JumpOperator> jump_operators(const JCParams& p, const SpaceConfig& space);

/// H - (i/2) sum_j J_j^dag J_j.
Operator effective_hamiltonian(const Operator& h, std::span<const JumpOperator> jumps);

struct Superoperator {
  SpaceConfig space;
  Eigen::MatrixXcd matrix;  ///< d^2 x d^2, column-stacking convention

  int dim() const noexcept { return space.dim(); }
};

Eigen::VectorXcd vectorize(const Operator& rho);
Operator unvectorize(const Eigen::VectorXcd& v, int dim);

/// Row vector t with t . vec(rho) = trace(rho).
Eigen::RowVectorXcd trace_functional(int dim);

/// rho' = -i[H, rho] + gamma D[s-] rho + kappa (2 a rho a^dag - a^dag a rho - rho a^dag a).
Superoperator build_liouvillian(const Operator& h, const JCParams& p, const SpaceConfig& space);

/// ||vec(I)^dag L|| / ||L||, zero for an exactly trace-preserving generator.
double trace_preservation_defect(const Superoperator& l);

/// Number of singular values of L below rel_tol * sigma_max.
int null_space_dimension(const Superoperator& l, double rel_tol = 1e-10);

struct SteadyStateResult {
  static constexpr double kResidualTolerance = 1e-9;

  DensityMatrix rho;
  double residual;         ///< ||L vec(rho)||_inf
  double truncation_tail;  ///< population of the top two Fock levels
};

/// Unique steady state by direct LU solve with the trace constraint replacing one row.
/// Throws SolverError if the null space is degenerate or the residual exceeds tolerance.
SteadyStateResult steady_state(const Superoperator& l);

/// Steady state reached from `initial`. When the null space is degenerate the result is the
/// spectral projection of `initial` onto it, fixed by the conserved quantities (left null vectors).
SteadyStateResult steady_state(const Superoperator& l, const DensityMatrix& initial);

/// ||L vec(rho)||_inf.
double residual_norm(const Superoperator& l, const DensityMatrix& rho);

/// Population in Fock levels n_photon_max - 1 and n_photon_max.
double truncation_tail(const DensityMatrix& rho, const SpaceConfig& space);

}  // namespace photocorr
