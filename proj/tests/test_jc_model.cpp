#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "photocorr/errors.hpp"
#include "photocorr/jc_model.hpp"

using namespace photocorr;

TEST(JCParams, FromRatios) {
  const auto p = JCParams::from_ratios(1.0, 0.01, 0.01, 0.1);
  EXPECT_DOUBLE_EQ(p.kappa, 0.005);
  EXPECT_DOUBLE_EQ(p.gamma, 0.01);
  EXPECT_DOUBLE_EQ(p.drive, 0.0005);
}

TEST(JCParams, Validation) {
  JCParams p;
  p.g = 0.0;
  EXPECT_THROW(p.validate(), ArgumentError);
  EXPECT_NO_THROW(p.validate_allow_uncoupled());
  p.g = 1.0;
  p.kappa = -1.0;
  EXPECT_THROW(p.validate(), ArgumentError);
  p.kappa = NAN;
  EXPECT_THROW(p.validate(), ArgumentError);
}

TEST(Hamiltonian, Hermitian) {
  const auto p = JCParams::from_ratios(1.0, 0.1, 0.1, 1.0, 0.37);
  EXPECT_LT(hermiticity_defect(interaction_hamiltonian(p, SpaceConfig{10})), 1e-12);
}

TEST(Hamiltonian, GroundStateAnnihilatedWithoutDrive) {
  JCParams p;
  const SpaceConfig s{5};
  const auto psi = basis_state(s, Qubit::ground, 0);
  EXPECT_LT((interaction_hamiltonian(p, s) * psi).norm(), 1e-15);
}

TEST(Hamiltonian, UncoupledCommutesWithNumber) {
  JCParams p;
  p.g = 0.0;
  p.delta = 0.3;
  const SpaceConfig s{6};
  const Operator h = interaction_hamiltonian(p, s);
  const Operator n = on_cavity(s, number_operator(6));
  EXPECT_LT((h * n - n * h).norm(), 1e-14);
}

TEST(Hamiltonian, DressedLadderInSpectrum) {
  JCParams p;
  p.g = 0.8;
  const int nmax = 9;
  const auto h = interaction_hamiltonian(p, SpaceConfig{nmax});
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  const auto& ev = es.eigenvalues();
  // manifold n pairs |n,g> with |n-1,e>; the top manifold is cut by truncation
  for (int n = 1; n <= nmax; ++n) {
    for (auto branch : {Branch::upper, Branch::lower}) {
      const double e = dressed_energy(n, branch, p.g);
      double best = INFINITY;
      for (int i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev(i) - e));
      EXPECT_LT(best, 1e-9 * p.g) << "n=" << n;
    }
  }
}

TEST(Dressed, Values) {
  EXPECT_DOUBLE_EQ(dressed_energy(1, Branch::upper, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(dressed_energy(4, Branch::lower, 1.0), -2.0);
  EXPECT_NEAR(dressed_energy(2, Branch::upper, 1.0), 1.41421356, 1e-8);
  EXPECT_THROW(dressed_energy(0, Branch::upper, 1.0), ArgumentError);
}

TEST(Dressed, ResonanceDetunings) {
  const auto [p1, m1] = resonance_detunings(1, 1.0);
  EXPECT_DOUBLE_EQ(p1, 1.0);
  EXPECT_DOUBLE_EQ(m1, -1.0);
  const auto [p2, m2] = resonance_detunings(2, 1.0);
  EXPECT_NEAR(p2, 0.70711, 1e-5);
  EXPECT_NEAR(m2, -0.70711, 1e-5);
  const auto [p4, m4] = resonance_detunings(4, 1.0);
  EXPECT_DOUBLE_EQ(p4, 0.5);
  EXPECT_DOUBLE_EQ(m4, -0.5);
  EXPECT_THROW(resonance_detunings(0, 1.0), ArgumentError);
  // n-photon resonance: n * delta matches the dressed splitting g sqrt(n)
  for (int n = 1; n <= 6; ++n) {
    const auto [plus, minus] = resonance_detunings(n, 1.0);
    EXPECT_NEAR(n * plus, dressed_energy(n, Branch::upper, 1.0), 1e-14);
    EXPECT_NEAR(n * minus, dressed_energy(n, Branch::lower, 1.0), 1e-14);
  }
}
