#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "photocorr/errors.hpp"
#include "photocorr/hilbert.hpp"

using namespace photocorr;

namespace {

Operator random_operator(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Operator m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

}  // namespace

TEST(Ladder, SinglePhotonTruncation) {
  const auto a = annihilation(1);
  ASSERT_EQ(a.rows(), 2);
  EXPECT_EQ(a(0, 1), Complex(1.0));
  EXPECT_EQ(a(0, 0), Complex(0.0));
  EXPECT_EQ(a(1, 0), Complex(0.0));
  EXPECT_EQ(a(1, 1), Complex(0.0));
}

TEST(Ladder, SqrtTwoEntry) { EXPECT_NEAR(annihilation(2)(1, 2).real(), 1.41421356, 1e-8); }

TEST(Ladder, NumberOperatorOnFockTwo) {
  Eigen::VectorXcd ket = Eigen::VectorXcd::Zero(5);
  ket(2) = 1.0;
  const Eigen::VectorXcd out = creation(4) * annihilation(4) * ket;
  EXPECT_NEAR((out - 2.0 * ket).norm(), 0.0, 1e-15);
  EXPECT_NEAR((number_operator(4) * ket - 2.0 * ket).norm(), 0.0, 1e-15);
}

TEST(Ladder, RejectsEmptyTruncation) {
  EXPECT_THROW(annihilation(0), ArgumentError);
  EXPECT_THROW(SpaceConfig{0}.validate(), ArgumentError);
}

TEST(Ladder, CanonicalCommutatorAwayFromBoundary) {
  const int n = 8;
  const auto a = annihilation(n);
  const auto ad = creation(n);
  const Operator comm = a * ad - ad * a;
  // truncation artifact lives only in the top Fock level
  for (int i = 0; i <= n - 2; ++i) {
    for (int j = 0; j <= n - 2; ++j) {
      EXPECT_NEAR(std::abs(comm(i, j) - (i == j ? 1.0 : 0.0)), 0.0, 1e-14) << i << "," << j;
    }
  }
}

TEST(Pauli, Identities) {
  const auto sm = pauli_lowering();
  const auto sp = pauli_raising();
  Operator proj_e = Operator::Zero(2, 2);
  proj_e(1, 1) = 1.0;
  EXPECT_TRUE((sp * sm).isApprox(proj_e));
  EXPECT_TRUE((sm * sp + sp * sm).isApprox(identity(2)));
  EXPECT_TRUE((sp * sm - sm * sp).isApprox(pauli_z()));
}

TEST(Kron, Identities) {
  EXPECT_TRUE(kron(identity(2), identity(3)).isApprox(identity(6)));
  const SpaceConfig s{4};
  const Operator sz = on_qubit(s, pauli_z());
  const Operator n = on_cavity(s, number_operator(4));
  EXPECT_NEAR((sz * n - n * sz).norm(), 0.0, 1e-14);

  std::mt19937_64 rng(7);
  const auto a = random_operator(2, rng);
  const auto b = random_operator(3, rng);
  EXPECT_NEAR(std::abs(kron(a, b).trace() - a.trace() * b.trace()), 0.0, 1e-12);
}

TEST(Kron, QubitFirstOrdering) {
  // kron(sz, I) has -1 on the first cavity_dim indices (ground) then +1 (excited)
  const SpaceConfig s{3};
  const Operator sz = on_qubit(s, pauli_z());
  for (int i = 0; i < s.dim(); ++i) EXPECT_EQ(sz(i, i).real(), i < s.cavity_dim() ? -1.0 : 1.0);
  EXPECT_EQ(s.index(Qubit::excited, 2), 6);
  const auto psi = basis_state(s, Qubit::excited, 2);
  EXPECT_EQ(psi(6), Complex(1.0));
}

TEST(Adjoint, Involution) {
  std::mt19937_64 rng(3);
  const auto a = random_operator(5, rng);
  EXPECT_EQ(adjoint(adjoint(a)), a);
}

TEST(DensityMatrix, Invariants) {
  Operator bad = Operator::Identity(2, 2);
  EXPECT_THROW(DensityMatrix{bad}, ArgumentError);  // trace 2
  Operator nonherm = 0.5 * Operator::Identity(2, 2);
  nonherm(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix{nonherm}, ArgumentError);
  Operator negative = Operator::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix{negative}, ArgumentError);
  Operator ok = Operator::Zero(2, 2);
  ok(0, 0) = 0.25;
  ok(1, 1) = 0.75;
  EXPECT_NO_THROW(DensityMatrix{ok});
}

TEST(Expectation, FockStates) {
  const SpaceConfig s{4};
  const Operator n = on_cavity(s, number_operator(4));
  EXPECT_EQ(expectation(DensityMatrix::pure(basis_state(s, Qubit::ground, 0)), n), Complex(0.0));
  EXPECT_NEAR(std::abs(expectation(DensityMatrix::pure(basis_state(s, Qubit::ground, 2)), n) - 2.0), 0.0, 1e-15);
}

TEST(Expectation, HermitianAndConjugateSymmetric) {
  std::mt19937_64 rng(11);
  const int d = 6;
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_operator(d, rng);
    Operator rho = x * x.adjoint();
    rho /= rho.trace();
    const DensityMatrix r(rho);
    const auto o = random_operator(d, rng);
    const Operator herm = o + o.adjoint();
    EXPECT_LT(std::abs(expectation(r, herm).imag()), 1e-12);
    EXPECT_NEAR(std::abs(expectation(r, o.adjoint()) - std::conj(expectation(r, o))), 0.0, 1e-12);
    const auto o2 = random_operator(d, rng);
    const Complex lhs = expectation(r, 2.0 * o + o2);
    EXPECT_NEAR(std::abs(lhs - (2.0 * expectation(r, o) + expectation(r, o2))), 0.0, 1e-12);
  }
}

TEST(Expectation, DimensionMismatch) {
  const DensityMatrix r = DensityMatrix::pure(Eigen::VectorXcd::Unit(4, 0));
  EXPECT_THROW(expectation(r, Operator::Identity(3, 3)), ArgumentError);
}
