#include "photocorr/jc_model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "photocorr/errors.hpp"

namespace photocorr {

namespace {

void check_rates(const JCParams& p) {
  const bool finite = std::isfinite(p.g) && std::isfinite(p.kappa) && std::isfinite(p.gamma) &&
                      std::isfinite(p.drive) && std::isfinite(p.delta);
  if (!finite) throw ArgumentError("JCParams: all parameters must be finite");
  if (p.kappa < 0.0 || p.gamma < 0.0 || p.drive < 0.0) {
    throw ArgumentError(fmt::format("JCParams: kappa={}, gamma={}, drive={} must all be >= 0", p.kappa,
                                    p.gamma, p.drive));
  }
}

}  // namespace

JCParams JCParams::from_ratios(double g, double two_kappa_over_g, double gamma_over_g,
                               double drive_over_kappa, double delta_over_g) {
  JCParams p;
  p.g = g;
  p.kappa = 0.5 * two_kappa_over_g * g;
  p.gamma = gamma_over_g * g;
  p.drive = drive_over_kappa * p.kappa;
  p.delta = delta_over_g * g;
  return p;
}

void JCParams::validate() const {
  check_rates(*this);
  if (!(g > 0.0)) throw ArgumentError(fmt::format("JCParams: g must be > 0, got {}", g));
}

void JCParams::validate_allow_uncoupled() const {
  check_rates(*this);
  if (g < 0.0) throw ArgumentError(fmt::format("JCParams: g must be >= 0, got {}", g));
}

Operator interaction_hamiltonian(const JCParams& p, const SpaceConfig& space) {
  p.validate_allow_uncoupled();
  space.validate();
  const Complex i{0.0, 1.0};
  const Operator a = on_cavity(space, annihilation(space.n_photon_max));
  const Operator ad = a.adjoint();
  const Operator sm = on_qubit(space, pauli_lowering());
  const Operator sp = sm.adjoint();
  const Operator sz = on_qubit(space, pauli_z());

  Operator h = p.delta * (ad * a + 0.5 * sz);
  h += i * p.g * (ad * sm - a * sp);
  h += i * p.drive * (ad - a);
  return h;
}

double dressed_energy(int n, Branch branch, double g) {
  if (n < 1) throw ArgumentError(fmt::format("dressed_energy: n must be >= 1, got {}", n));
  const double split = g * std::sqrt(static_cast<double>(n));
  return branch == Branch::upper ? split : -split;
}

ResonancePair resonance_detunings(int n, double g) {
  if (n < 1) throw ArgumentError(fmt::format("resonance_detunings: n must be >= 1, got {}", n));
  // n wL = n w0 +- g sqrt(n)  =>  delta = w0 - wL = -+ g / sqrt(n)
  const double d = g / std::sqrt(static_cast<double>(n));
  return {d, -d};
}

}  // namespace photocorr
