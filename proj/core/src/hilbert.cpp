#include "photocorr/hilbert.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "photocorr/errors.hpp"

namespace photocorr {

void SpaceConfig::validate() const {
  if (n_photon_max < 1) {
    throw ArgumentError(fmt::format("n_photon_max must be >= 1, got {}", n_photon_max));
  }
}

Operator annihilation(int n_photon_max) {
  if (n_photon_max < 1) {
    throw ArgumentError(fmt::format("annihilation: n_photon_max must be >= 1, got {}", n_photon_max));
  }
  const int d = n_photon_max + 1;
  Operator a = Operator::Zero(d, d);
  for (int m = 1; m < d; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return a;
}

Operator creation(int n_photon_max) { return adjoint(annihilation(n_photon_max)); }

Operator number_operator(int n_photon_max) {
  const Operator a = annihilation(n_photon_max);
  return a.adjoint() * a;
}

Operator pauli_lowering() {
  Operator s = Operator::Zero(2, 2);
  s(0, 1) = 1.0;  // |g><e|
  return s;
}

Operator pauli_raising() { return adjoint(pauli_lowering()); }

Operator pauli_z() {
  Operator z = Operator::Zero(2, 2);
  z(0, 0) = -1.0;
  z(1, 1) = 1.0;
  return z;
}

Operator identity(int dim) { return Operator::Identity(dim, dim); }

Operator adjoint(const Operator& op) { return op.adjoint(); }

Operator kron(const Operator& left, const Operator& right) {
  return Eigen::kroneckerProduct(left, right).eval();
}

Operator on_cavity(const SpaceConfig& space, const Operator& cavity_op) {
  if (cavity_op.rows() != space.cavity_dim() || cavity_op.cols() != space.cavity_dim()) {
    throw ArgumentError("on_cavity: operator does not match the cavity dimension");
  }
  return kron(identity(2), cavity_op);
}

Operator on_qubit(const SpaceConfig& space, const Operator& qubit_op) {
  if (qubit_op.rows() != 2 || qubit_op.cols() != 2) {
    throw ArgumentError("on_qubit: qubit operators are 2x2");
  }
  return kron(qubit_op, identity(space.cavity_dim()));
}

StateVector basis_state(const SpaceConfig& space, Qubit q, int n) {
  if (n < 0 || n > space.n_photon_max) {
    throw ArgumentError(fmt::format("basis_state: photon number {} outside [0, {}]", n, space.n_photon_max));
  }
  StateVector psi = StateVector::Zero(space.dim());
  psi(space.index(q, n)) = 1.0;
  return psi;
}

double hermiticity_defect(const Operator& op) {
  if (op.rows() != op.cols()) return INFINITY;
  return (op - op.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(Operator entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw ArgumentError("DensityMatrix: entries must be a non-empty square matrix");
  }
  const Complex tr = entries_.trace();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    throw ArgumentError(fmt::format("DensityMatrix: trace {} + {}i is not 1", tr.real(), tr.imag()));
  }
  const double herm = hermiticity_defect(entries_);
  if (herm > kHermiticityTolerance) {
    throw ArgumentError(fmt::format("DensityMatrix: not Hermitian (defect {:.3e})", herm));
  }
  Eigen::SelfAdjointEigenSolver<Operator> eig(entries_, Eigen::EigenvaluesOnly);
  const double lowest = eig.eigenvalues().minCoeff();
  if (lowest < kEigenvalueFloor) {
    throw ArgumentError(fmt::format("DensityMatrix: eigenvalue {:.3e} below {:.0e}", lowest, kEigenvalueFloor));
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const double n2 = psi.squaredNorm();
  if (!(n2 > 0.0)) throw ArgumentError("DensityMatrix::pure: zero state vector");
  return DensityMatrix((psi * psi.adjoint()) / n2);
}

Complex expectation(const DensityMatrix& rho, const Operator& op) {
  if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
    throw ArgumentError(fmt::format("expectation: operator is {}x{}, state is {}x{}", op.rows(), op.cols(),
                                    rho.dim(), rho.dim()));
  }
  // trace(rho * op) without forming the product.
  return (rho.matrix().transpose().cwiseProduct(op)).sum();
}

}  // namespace photocorr
