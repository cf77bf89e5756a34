#pragma once

// Truncated qubit (x) cavity Hilbert space and the dense linear-algebra kernel.
//
// Tensor ordering is qubit first: the composite basis index of |n, q> is
// q * (n_photon_max + 1) + n, with q = 0 for |g> and q = 1 for |e>.

#include <complex>

#include <Eigen/Dense>

namespace photocorr {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

enum class Qubit : int { ground = 0, excited = 1 };

struct SpaceConfig {
  int n_photon_max = 12;

  int cavity_dim() const noexcept { return n_photon_max + 1; }
  int dim() const noexcept { return 2 * cavity_dim(); }
  int index(Qubit q, int n) const noexcept { return static_cast<int>(q) * cavity_dim() + n; }

  /// Throws ArgumentError when n_photon_max < 1.
  void validate() const;
};

/// Truncated ladder operator with a[m-1, m] = sqrt(m).
Operator annihilation(int n_photon_max);
Operator creation(int n_photon_max);
Operator number_operator(int n_photon_max);

/// Qubit operators in the {|g>, |e>} basis.
Operator pauli_lowering();
Operator pauli_raising();
Operator pauli_z();

Operator identity(int dim);
Operator adjoint(const Operator& op);
Operator kron(const Operator& left, const Operator& right);

/// Embeds a single-subsystem operator into the composite space.
Operator on_cavity(const SpaceConfig& space, const Operator& cavity_op);
Operator on_qubit(const SpaceConfig& space, const Operator& qubit_op);

StateVector basis_state(const SpaceConfig& space, Qubit q, int n);

/// max |A - A^dagger| over all entries.
double hermiticity_defect(const Operator& op);

/// Hermitian, unit-trace, positive semidefinite state. Invariants are checked on construction.
class DensityMatrix {
 public:
  static constexpr double kTraceTolerance = 1e-10;
  static constexpr double kHermiticityTolerance = 1e-10;
  static constexpr double kEigenvalueFloor = -1e-8;

  explicit DensityMatrix(Operator entries);

  static DensityMatrix pure(const StateVector& psi);

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const Operator& matrix() const noexcept { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

 private:
  Operator entries_;
};

/// trace(rho * op).
Complex expectation(const DensityMatrix& rho, const Operator& op);

}  // namespace photocorr
