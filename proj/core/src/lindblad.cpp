#include "photocorr/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "photocorr/errors.hpp"

namespace photocorr {

namespace {

constexpr double kDegenerateRcond = 1e-14;
constexpr double kNullRelTol = 1e-10;

void check_dims(const Superoperator& l, int rho_dim, const char* where) {
  if (rho_dim != l.dim()) {
    throw ArgumentError(fmt::format("{}: state dimension {} does not match Liouvillian dimension {}", where,
                                    rho_dim, l.dim()));
  }
}

// Hermitize, renormalize, and reject states with eigenvalues below the floor. Small negative
// eigenvalues are left in place: rebuilding rho from its eigendecomposition would inject
// O(1e-16) absolute noise into Fock populations that carry physics far below that scale.
DensityMatrix condition_state(const Eigen::VectorXcd& x, int dim, double residual_hint) {
  Operator rho = unvectorize(x, dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const Complex tr = rho.trace();
  if (!std::isfinite(tr.real()) || std::abs(tr) < 1e-300) {
    throw SolverError("steady_state: solution has zero or non-finite trace", -1, residual_hint);
  }
  rho /= tr.real();
  Eigen::SelfAdjointEigenSolver<Operator> eig(rho, Eigen::EigenvaluesOnly);
  const double lowest = eig.eigenvalues().minCoeff();
  if (lowest < DensityMatrix::kEigenvalueFloor) {
    throw SolverError(fmt::format("steady_state: eigenvalue {:.3e} below {:.0e}", lowest,
                                  DensityMatrix::kEigenvalueFloor),
                      -1, residual_hint);
  }
  return DensityMatrix(std::move(rho));
}

SteadyStateResult finish(const Superoperator& l, DensityMatrix rho) {
  const double res = residual_norm(l, rho);
  if (!(res < SteadyStateResult::kResidualTolerance)) {
    throw SolverError(fmt::format("steady_state: residual {:.3e} above tolerance {:.0e}", res,
                                  SteadyStateResult::kResidualTolerance),
                      1, res);
  }
  const double tail = truncation_tail(rho, l.space);
  return SteadyStateResult{std::move(rho), res, tail};
}

// Returns an empty vector when the trace-constrained system is singular.
Eigen::VectorXcd solve_trace_constrained(const Superoperator& l) {
  const int d = l.dim();
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  Eigen::MatrixXcd m = l.matrix;
  m.row(0) = trace_functional(d);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  b(0) = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  if (!(lu.rcond() > kDegenerateRcond)) return {};
  Eigen::VectorXcd x = lu.solve(b);
  if (!x.allFinite()) return {};
  return x;
}


// Indices of vec(rho) grouped into the connected components of L's sparsity graph. Decoupled
// subsystems (the usual source of degeneracy) split L into independent diagonal blocks.
std::vector<std::vector<Eigen::Index>> coupled_blocks(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  };
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (m(i, j) != Complex(0.0)) parent[static_cast<std::size_t>(find(i))] = find(j);
    }
  }
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& s = slot[static_cast<std::size_t>(find(i))];
    if (s < 0) {
      s = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[static_cast<std::size_t>(s)].push_back(i);
  }
  return blocks;
}

// Left null vectors (conserved functionals) of a block, as rows. Rank-revealing full-pivot LU
// gives an echelon-form kernel with exact zeros where the structure has them.
Eigen::MatrixXcd left_kernel(const Eigen::MatrixXcd& b) {
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(b.adjoint());
  lu.setThreshold(kNullRelTol);
  if (lu.rank() == b.rows()) return Eigen::MatrixXcd(0, b.rows());
  return lu.kernel().adjoint();
}

int degenerate_null_dimension(const Superoperator& l) {
  int nd = 0;
  for (const auto& idx : coupled_blocks(l.matrix)) nd += static_cast<int>(left_kernel(l.matrix(idx, idx)).rows());
  return nd;
}

// Stationary state reached from x0 when L has several: within each block the conserved
// functionals K x = K x0 replace the rows of the block in the pivot set of K (those rows are
// combinations of the others since K L = 0), and the square system is solved by LU. This is the
// spectral projection onto the null space, without the absolute round-off an SVD basis would
// spread over small populations.
Eigen::VectorXcd solve_degenerate(const Superoperator& l, const Eigen::VectorXcd& x0) {
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(x0.size());
  int nd = 0;
  for (const auto& idx : coupled_blocks(l.matrix)) {
    const Eigen::MatrixXcd b = l.matrix(idx, idx);
    const Eigen::MatrixXcd k = left_kernel(b);
    if (k.rows() == 0) continue;  // decaying block
    nd += static_cast<int>(k.rows());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(k);
    const auto& perm = qr.colsPermutation().indices();
    const Eigen::VectorXcd conserved = k * x0(idx);
    Eigen::MatrixXcd m = b;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(b.rows());
    for (Eigen::Index c = 0; c < k.rows(); ++c) {
      m.row(perm(c)) = k.row(c);
      rhs(perm(c)) = conserved(c);
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    if (!(lu.rcond() > kDegenerateRcond)) {
      throw SolverError("steady_state: zero eigenvalue of L is not semisimple", static_cast<int>(k.rows()), INFINITY);
    }
    const Eigen::VectorXcd block_x = lu.solve(rhs);
    x(idx) = block_x;
  }
  if (nd == 0) throw SolverError("steady_state: trace-constrained system singular but L has no null space", 0, INFINITY);
  return x;
}

}  // namespace

std::string_view channel_name(Channel c) { return c == Channel::cavity ? "cavity" : "qubit"; }

std::vector<JumpOperator> jump_operators(const JCParams& p, const SpaceConfig& space) {
  p.validate_allow_uncoupled();
  space.validate();
  std::vector<JumpOperator> jumps;
  if (p.kappa > 0.0) {
    jumps.push_back({Channel::cavity, std::sqrt(2.0 * p.kappa) * on_cavity(space, annihilation(space.n_photon_max))});
  }
  if (p.gamma > 0.0) {
    jumps.push_back({Channel::qubit, std::sqrt(p.gamma) * on_qubit(space, pauli_lowering())});
  }
  return jumps;
}

Operator effective_hamiltonian(const Operator& h, std::span<const JumpOperator> jumps) {
  Operator heff = h;
  const Complex half_i{0.0, 0.5};
  for (const auto& j : jumps) {
    if (j.op.rows() != h.rows()) throw ArgumentError("effective_hamiltonian: jump operator dimension mismatch");
    heff -= half_i * (j.op.adjoint() * j.op);
  }
  return heff;
}

Eigen::VectorXcd vectorize(const Operator& rho) {
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

Operator unvectorize(const Eigen::VectorXcd& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw ArgumentError(fmt::format("unvectorize: vector of length {} is not {}^2", v.size(), dim));
  }
  return Eigen::Map<const Operator>(v.data(), dim, dim);
}

Eigen::RowVectorXcd trace_functional(int dim) {
  Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(static_cast<Eigen::Index>(dim) * dim);
  for (int i = 0; i < dim; ++i) t(static_cast<Eigen::Index>(i) * dim + i) = 1.0;
  return t;
}

Superoperator build_liouvillian(const Operator& h, const JCParams& p, const SpaceConfig& space) {
  space.validate();
  const int d = space.dim();
  if (h.rows() != d || h.cols() != d) {
    throw ArgumentError(fmt::format("build_liouvillian: Hamiltonian is {}x{}, space dimension is {}", h.rows(),
                                    h.cols(), d));
  }
  if (hermiticity_defect(h) > 1e-10) throw ArgumentError("build_liouvillian: Hamiltonian is not Hermitian");

  const auto jumps = jump_operators(p, space);
  const Operator heff = effective_hamiltonian(h, jumps);
  const Operator id = identity(d);
  const Complex i{0.0, 1.0};

  // -i Heff rho + i rho Heff^dag + sum_j J rho J^dag
  Superoperator l{space, Eigen::kroneckerProduct(id, (-i * heff).eval()).eval()};
  l.matrix += Eigen::kroneckerProduct((i * heff.conjugate()).eval(), id);
  for (const auto& j : jumps) l.matrix += Eigen::kroneckerProduct(j.op.conjugate().eval(), j.op);
  return l;
}

double trace_preservation_defect(const Superoperator& l) {
  const double scale = l.matrix.norm();
  if (scale == 0.0) return 0.0;
  return (trace_functional(l.dim()) * l.matrix).norm() / scale;
}

int null_space_dimension(const Superoperator& l, double rel_tol) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(l.matrix);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double cutoff = rel_tol * s(0);
  return static_cast<int>((s.array() <= cutoff).count());
}

SteadyStateResult steady_state(const Superoperator& l) {
  Eigen::VectorXcd x = solve_trace_constrained(l);
  if (x.size() == 0) {
    const int nd = degenerate_null_dimension(l);
    throw SolverError(fmt::format("steady_state: degenerate null space of dimension {}", nd), nd, INFINITY);
  }
  return finish(l, condition_state(x, l.dim(), INFINITY));
}

SteadyStateResult steady_state(const Superoperator& l, const DensityMatrix& initial) {
  check_dims(l, initial.dim(), "steady_state");
  Eigen::VectorXcd x = solve_trace_constrained(l);
  if (x.size() != 0) return finish(l, condition_state(x, l.dim(), INFINITY));

  return finish(l, condition_state(solve_degenerate(l, vectorize(initial.matrix())), l.dim(), INFINITY));
}

double residual_norm(const Superoperator& l, const DensityMatrix& rho) {
  check_dims(l, rho.dim(), "residual_norm");
  return (l.matrix * vectorize(rho.matrix())).cwiseAbs().maxCoeff();
}

double truncation_tail(const DensityMatrix& rho, const SpaceConfig& space) {
  if (rho.dim() != space.dim()) throw ArgumentError("truncation_tail: dimension mismatch");
  double tail = 0.0;
  for (int q = 0; q < 2; ++q) {
    for (int n = std::max(0, space.n_photon_max - 1); n <= space.n_photon_max; ++n) {
      const int idx = space.index(static_cast<Qubit>(q), n);
      tail += rho(idx, idx).real();
    }
  }
  return tail;
}

}  // namespace photocorr
