#pragma once

// Quantum-jump (Monte-Carlo wavefunction) unraveling of the JC master equation into
// photodetection click records, and click-record estimators of the conditional ratios.
//
// Between jumps the unnormalized state evolves under the constant non-Hermitian
// H_eff = H_I - i (kappa a^dag a + gamma/2 s+ s-). H_eff is diagonalized once per ensemble
// so psi(tau) = V exp(-i Lambda tau) c exactly; jump times are located where ||psi||^2
// crosses a uniform variate (waiting-time algorithm), by doubling then bisection.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "photocorr/hilbert.hpp"
#include "photocorr/jc_model.hpp"
#include "photocorr/lindblad.hpp"

namespace photocorr {

struct Click {
  std::uint32_t trajectory;
  double time;
  Channel channel;

  friend bool operator==(const Click&, const Click&) = default;
};

/// Clicks grouped by trajectory index, time-ordered within each trajectory.
struct ClickRecord {
  std::vector<Click> clicks;
  double duration = 0.0;  ///< recorded window per trajectory, after transient discard
  std::uint32_t n_trajectories = 0;
  std::uint64_t seed = 0;

  /// Throws ArgumentError unless grouped, time-ordered (strictly if `strict`), and within [0, duration].
  void validate(bool strict = true) const;

  std::size_t count(Channel c) const;

  friend bool operator==(const ClickRecord&, const ClickRecord&) = default;
};

/// Exact propagation of the no-jump evolution psi' = -i H_eff psi in the eigenbasis of H_eff.
class NoJumpPropagator {
 public:
  static constexpr double kMaxCondition = 1e10;

  /// `observables` are evaluated as normalized expectations along the no-jump path.
  NoJumpPropagator(const Operator& heff, const std::vector<Operator>& observables);

  /// Eigenbasis coefficients c of psi.
  Eigen::VectorXcd coefficients(const StateVector& psi) const;
  StateVector state(const Eigen::VectorXcd& c, double tau) const;
  double norm2(const Eigen::VectorXcd& c, double tau) const;
  /// <psi(tau)| O_k |psi(tau)> / <psi(tau)|psi(tau)>.
  double expectation(const Eigen::VectorXcd& c, double tau, std::size_t observable) const;
  /// Integral of expectation(c, tau, k) over tau in [lo, hi] for every observable.
  std::vector<double> integrate_expectations(const Eigen::VectorXcd& c, double lo, double hi) const;

  double condition_number() const noexcept { return condition_; }
  /// Smallest decay rate among eigenmodes, -max Im(lambda).
  double slowest_decay() const noexcept;
  /// Largest |lambda|; sets the initial bracketing and quadrature scale.
  double fastest_rate() const noexcept { return fastest_; }

 private:
  Eigen::VectorXcd phases(const Eigen::VectorXcd& c, double tau) const;

  Eigen::VectorXcd eigenvalues_;
  Eigen::MatrixXcd vectors_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> vectors_lu_;
  Eigen::MatrixXcd gram_;                      // V^dag V
  std::vector<Eigen::MatrixXcd> observables_;  // V^dag O V
  double condition_ = 1.0;
  double fastest_ = 1.0;
};

struct EnsembleOptions {
  int workers = 1;
  bool track_expectations = false;  ///< time-average <a^dag a> and <s+ s-> over the recorded window
};

/// Post-transient time averages of one trajectory.
struct TrajectoryAverages {
  double photon_number = 0.0;
  double qubit_excitation = 0.0;
};

struct TrajectoryEnsemble {
  ClickRecord record;
  std::vector<TrajectoryAverages> averages;  ///< empty unless track_expectations
  double transient = 0.0;                    ///< discarded lead-in per trajectory
  std::uint64_t jumps = 0;                   ///< all jumps, including those inside the transient
};

/// 10 / min of the positive rates among (gamma, 2 kappa).
double transient_time(const JCParams& p);

/// Quantum-jump ensemble from |0,g> with collapse operators sqrt(2 kappa) a and sqrt(gamma) s-.
/// Trajectory i draws from the Philox substream (seed, i); output does not depend on `workers`.
TrajectoryEnsemble mcwf_ensemble(const JCParams& p, const SpaceConfig& space, double duration,
                                 std::uint32_t n_traj, std::uint64_t seed, const EnsembleOptions& options = {});

/// Keeps each cavity click independently with probability `efficiency`; qubit clicks untouched.
ClickRecord thin_record(const ClickRecord& record, double efficiency, std::uint64_t seed);

/// Per-trajectory sums of falling factorials m(m-1)...(m-k+1) of cavity counts per bin.
struct BinnedCounts {
  double bin_width = 0.0;
  std::uint64_t bins_per_trajectory = 0;
  std::vector<std::vector<double>> sums;  ///< [trajectory][k], k = 0..k_max

  std::uint64_t total_bins() const noexcept { return bins_per_trajectory * sums.size(); }
};

inline constexpr std::uint64_t kMinimumBins = 1000;

/// Throws StatisticsError if the record holds fewer than kMinimumBins bins.
BinnedCounts bin_counts(const ClickRecord& record, double bin_width, int k_max);

/// F_k = <m (m-1) ... (m-k+1)> over bins, k = 0..k_max.
std::vector<double> factorial_moments(const ClickRecord& record, double bin_width, int k_max);

struct FactorialMomentEstimate {
  std::vector<double> value;      ///< F_0..F_kmax
  std::vector<double> std_error;  ///< bootstrap over trajectories
  std::uint64_t n_bins = 0;
};

FactorialMomentEstimate estimate_factorial_moments(const ClickRecord& record, double bin_width, int k_max,
                                                   int n_bootstrap, std::uint64_t bootstrap_seed);

struct RatioEstimate {
  int k;
  double value;
  double std_error;
  std::uint64_t n_bins;
  double bin_width;
  bool valid;  ///< false when F_{k-1} vanishes
};

/// R_{k,k-1} = F_k F_{k-2} / F_{k-1}^2 for k = 2..k_max with trajectory-block bootstrap errors.
std::vector<RatioEstimate> estimate_ratios(const ClickRecord& record, double bin_width, int k_max,
                                           int n_bootstrap, std::uint64_t bootstrap_seed);

/// 0.05 / (2 kappa).
double default_bin_width(const JCParams& p);

/// Line-oriented text form: '# seed=', '# duration=', '# n_traj=' headers, then
/// 'trajectory<TAB>time<TAB>channel' rows with 12 significant digits.
void write_click_record(std::ostream& out, const ClickRecord& record);
ClickRecord read_click_record(std::istream& in);

}  // namespace photocorr
