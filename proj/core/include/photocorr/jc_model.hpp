#pragma once

// Driven Jaynes-Cummings model on resonance (atom and cavity both at w0), written in the
// frame rotating at the laser frequency wL. All rates are angular frequencies in the same
// units as the coupling g; presets use g = 1.

#include "photocorr/hilbert.hpp"

namespace photocorr {

struct JCParams {
  double g = 1.0;       ///< qubit-cavity coupling
  double kappa = 0.0;   ///< cavity field decay rate (energy decays at 2*kappa)
  double gamma = 0.0;   ///< qubit energy decay rate
  double drive = 0.0;   ///< classical driving strength, real and non-negative
  double delta = 0.0;   ///< detuning w0 - wL

  /// Builds parameters from the caption-style ratios 2kappa/g, gamma/g and drive/kappa.
  static JCParams from_ratios(double g, double two_kappa_over_g, double gamma_over_g,
                              double drive_over_kappa, double delta_over_g = 0.0);

  /// Throws ArgumentError unless g > 0, kappa >= 0, gamma >= 0, drive >= 0 and all finite.
  void validate() const;

  /// Like validate() but allows g == 0 (decoupled qubit, used by the empty-cavity oracle).
  void validate_allow_uncoupled() const;
};

/// H_I / hbar = delta (a^dag a + sz / 2) + i g (a^dag s- - a s+) + i drive (a^dag - a).
Operator interaction_hamiltonian(const JCParams& p, const SpaceConfig& space);

enum class Branch { upper, lower };

/// Rotating-frame dressed energy E_{n,+-}/hbar - n w0 = +-g sqrt(n).
double dressed_energy(int n, Branch branch, double g);

struct ResonancePair {
  double upper;  ///< +g / sqrt(n)
  double lower;  ///< -g / sqrt(n)
};

/// Detunings at which n-photon absorption into the n-th dressed doublet is resonant.
ResonancePair resonance_detunings(int n, double g);

}  // namespace photocorr
