#include "photocorr/trajectories.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "photocorr/errors.hpp"
#include "photocorr/philox.hpp"
#include "parallel.hpp"

namespace photocorr {

namespace {

constexpr double kBisectionRelTol = 1e-10;
constexpr double kNormTolerance = 1e-9;
constexpr int kMaxBracketSteps = 4000;
constexpr int kMaxBisectionSteps = 200;
constexpr double kSegmentGrowth = 1.25;

struct GaussLegendre16 {
  std::array<double, 16> nodes{};
  std::array<double, 16> weights{};
};

const GaussLegendre16& gauss16() {
  static const GaussLegendre16 rule = [] {
    GaussLegendre16 gl;
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      gl.nodes[static_cast<std::size_t>(i)] = x;
      gl.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
  }();
  return rule;
}

struct TrajectoryResult {
  std::vector<Click> clicks;
  TrajectoryAverages averages;
  std::uint64_t jumps = 0;
};

class JumpSimulator {
 public:
  JumpSimulator(const NoJumpPropagator& propagator, const std::vector<JumpOperator>& jumps,
                const SpaceConfig& space, double transient, double duration, bool track)
      : prop_(propagator), jumps_(jumps), space_(space), transient_(transient), duration_(duration),
        t_end_(transient + duration), track_(track) {}

  TrajectoryResult run(std::uint32_t index, std::uint64_t seed) const {
    auto rng = Philox4x32::substream(seed, StreamPurpose::trajectory, index);
    TrajectoryResult out;
    std::array<double, 2> integrals{0.0, 0.0};

    Eigen::VectorXcd c = prop_.coefficients(basis_state(space_, Qubit::ground, 0));
    double t = 0.0;
    const double h0 = 1.0 / prop_.fastest_rate();

    while (true) {
      const double remaining = t_end_ - t;
      const double u = rng.uniform_open();
      if (remaining <= 0.0 || prop_.norm2(c, remaining) > u) {
        accumulate(c, t, std::max(remaining, 0.0), integrals);
        break;
      }

      // ||psi(tau)||^2 is non-increasing, so doubling brackets the unique crossing.
      double lo = 0.0;
      double hi = std::min(h0, remaining);
      int steps = 0;
      while (prop_.norm2(c, hi) > u) {
        lo = hi;
        hi = std::min(2.0 * hi, remaining);
        if (++steps > kMaxBracketSteps) {
          throw SimulationError(fmt::format("trajectory {}: jump-time bracketing did not terminate at t={}", index, t));
        }
      }
      for (int it = 0; it < kMaxBisectionSteps && (hi - lo) > kBisectionRelTol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (prop_.norm2(c, mid) > u) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double tau = hi;
      accumulate(c, t, tau, integrals);
      t += tau;

      StateVector psi = prop_.state(c, tau);
      std::vector<double> rates;
      rates.reserve(jumps_.size());
      double total = 0.0;
      for (const auto& j : jumps_) {
        rates.push_back((j.op * psi).squaredNorm());
        total += rates.back();
      }
      if (!(total > 0.0) || !std::isfinite(total)) {
        throw SimulationError(fmt::format("trajectory {}: zero total jump rate at t={} (norm {:.3e})", index, t,
                                          psi.squaredNorm()));
      }
      const double pick = rng.uniform_open() * total;
      std::size_t which = 0;
      double acc = rates[0];
      while (which + 1 < rates.size() && pick > acc) acc += rates[++which];

      psi = jumps_[which].op * psi;
      psi.normalize();
      c = prop_.coefficients(psi);
      const double n2 = prop_.norm2(c, 0.0);
      if (std::abs(n2 - 1.0) > kNormTolerance) {
        throw SimulationError(fmt::format("trajectory {}: post-jump norm {:.15f} outside 1 +- {:.0e}", index, n2,
                                          kNormTolerance));
      }
      ++out.jumps;
      if (t >= transient_) out.clicks.push_back({index, t - transient_, jumps_[which].channel});
    }

    if (track_) {
      out.averages.photon_number = integrals[0] / duration_;
      out.averages.qubit_excitation = integrals[1] / duration_;
    }
    return out;
  }

 private:
  void accumulate(const Eigen::VectorXcd& c, double t0, double tau, std::array<double, 2>& integrals) const {
    if (!track_) return;
    const double lo = std::max(0.0, transient_ - t0);
    if (tau <= lo) return;
    const auto part = prop_.integrate_expectations(c, lo, tau);
    integrals[0] += part[0];
    integrals[1] += part[1];
  }

  const NoJumpPropagator& prop_;
  const std::vector<JumpOperator>& jumps_;
  SpaceConfig space_;
  double transient_;
  double duration_;
  double t_end_;
  bool track_;
};

double falling_factorial(std::uint64_t m, int k) {
  double f = 1.0;
  for (int j = 0; j < k; ++j) f *= static_cast<double>(m) - j;
  return f;
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return INFINITY;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Trajectory-block bootstrap: each replicate resamples whole trajectories with replacement.
template <class Fn>
void bootstrap_replicates(const BinnedCounts& bins, int k_max, int n_bootstrap, std::uint64_t seed, Fn&& on_replicate) {
  const auto n_traj = static_cast<std::uint64_t>(bins.sums.size());
  auto rng = Philox4x32::substream(seed, StreamPurpose::bootstrap, 0);
  std::vector<double> f(static_cast<std::size_t>(k_max) + 1);
  const double total = static_cast<double>(bins.total_bins());
  for (int b = 0; b < n_bootstrap; ++b) {
    std::fill(f.begin(), f.end(), 0.0);
    for (std::uint64_t i = 0; i < n_traj; ++i) {
      const auto pick = static_cast<std::size_t>((static_cast<std::uint64_t>(rng()) * n_traj) >> 32);
      for (int k = 0; k <= k_max; ++k) f[static_cast<std::size_t>(k)] += bins.sums[pick][static_cast<std::size_t>(k)];
    }
    for (double& x : f) x /= total;
    on_replicate(f);
  }
}

void check_bootstrap(const ClickRecord& record, int n_bootstrap) {
  if (n_bootstrap < 2) throw ArgumentError("bootstrap: n_bootstrap must be >= 2");
  if (record.n_trajectories < 2) throw StatisticsError("bootstrap over trajectories needs at least 2 trajectories");
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// ClickRecord

void ClickRecord::validate(bool strict) const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ArgumentError("ClickRecord: duration must be positive");
  const Click* prev = nullptr;
  for (const auto& c : clicks) {
    if (c.trajectory >= n_trajectories) {
      throw ArgumentError(fmt::format("ClickRecord: trajectory index {} >= n_traj {}", c.trajectory, n_trajectories));
    }
    if (!(c.time >= 0.0) || c.time > duration) {
      throw ArgumentError(fmt::format("ClickRecord: time {} outside [0, {}]", c.time, duration));
    }
    if (prev != nullptr) {
      if (c.trajectory < prev->trajectory) throw ArgumentError("ClickRecord: clicks not grouped by trajectory");
      if (c.trajectory == prev->trajectory) {
        const bool ordered = strict ? c.time > prev->time : c.time >= prev->time;
        if (!ordered) {
          throw ArgumentError(fmt::format("ClickRecord: times not increasing in trajectory {} at t={}", c.trajectory, c.time));
        }
      }
    }
    prev = &c;
  }
}

std::size_t ClickRecord::count(Channel ch) const {
  return static_cast<std::size_t>(
      std::count_if(clicks.begin(), clicks.end(), [ch](const Click& c) { return c.channel == ch; }));
}

// ---------------------------------------------------------------------------------------------
// NoJumpPropagator

NoJumpPropagator::NoJumpPropagator(const Operator& heff, const std::vector<Operator>& observables) {
  if (heff.rows() == 0 || heff.rows() != heff.cols()) throw ArgumentError("NoJumpPropagator: H_eff must be square");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(heff);
  if (eig.info() != Eigen::Success) throw SimulationError("NoJumpPropagator: eigendecomposition of H_eff failed");
  eigenvalues_ = eig.eigenvalues();
  vectors_ = eig.eigenvectors();

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vectors_);
  const auto& s = svd.singularValues();
  condition_ = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
  if (!(condition_ < kMaxCondition)) {
    throw SimulationError(fmt::format("NoJumpPropagator: H_eff eigenbasis condition number {:.3e} exceeds {:.0e}",
                                      condition_, kMaxCondition));
  }
  vectors_lu_.compute(vectors_);
  gram_ = vectors_.adjoint() * vectors_;
  for (const auto& o : observables) {
    if (o.rows() != heff.rows() || o.cols() != heff.cols()) throw ArgumentError("NoJumpPropagator: observable dimension mismatch");
    observables_.push_back(vectors_.adjoint() * o * vectors_);
  }
  fastest_ = std::max(eigenvalues_.cwiseAbs().maxCoeff(), 1e-12);
}

double NoJumpPropagator::slowest_decay() const noexcept { return -eigenvalues_.imag().maxCoeff(); }

Eigen::VectorXcd NoJumpPropagator::coefficients(const StateVector& psi) const {
  if (psi.size() != vectors_.rows()) throw ArgumentError("NoJumpPropagator: state dimension mismatch");
  return vectors_lu_.solve(psi);
}

Eigen::VectorXcd NoJumpPropagator::phases(const Eigen::VectorXcd& c, double tau) const {
  const Complex minus_i_tau{0.0, -tau};
  Eigen::VectorXcd z(c.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) z(j) = c(j) * std::exp(minus_i_tau * eigenvalues_(j));
  return z;
}

StateVector NoJumpPropagator::state(const Eigen::VectorXcd& c, double tau) const { return vectors_ * phases(c, tau); }

double NoJumpPropagator::norm2(const Eigen::VectorXcd& c, double tau) const {
  const Eigen::VectorXcd z = phases(c, tau);
  return z.dot(gram_ * z).real();
}

double NoJumpPropagator::expectation(const Eigen::VectorXcd& c, double tau, std::size_t observable) const {
  const Eigen::VectorXcd z = phases(c, tau);
  return z.dot(observables_.at(observable) * z).real() / z.dot(gram_ * z).real();
}

std::vector<double> NoJumpPropagator::integrate_expectations(const Eigen::VectorXcd& c, double lo, double hi) const {
  std::vector<double> total(observables_.size(), 0.0);
  if (!(hi > lo)) return total;
  const auto& gl = gauss16();
  // Geometric panels anchored at tau = 0: fine where post-jump transients oscillate, coarse
  // once the state has settled onto its slowest no-jump mode.
  double begin = 0.0;
  double width = 0.5 / fastest_;
  while (begin < hi) {
    const double end = begin + width;
    const double a = std::max(begin, lo);
    const double b = std::min(end, hi);
    if (b > a) {
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (a + b);
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const Eigen::VectorXcd z = phases(c, mid + half * gl.nodes[q]);
        const double n2 = z.dot(gram_ * z).real();
        if (!(n2 > 0.0)) continue;
        for (std::size_t k = 0; k < observables_.size(); ++k) {
          total[k] += half * gl.weights[q] * z.dot(observables_[k] * z).real() / n2;
        }
      }
    }
    begin = end;
    width *= kSegmentGrowth;
  }
  return total;
}

// ---------------------------------------------------------------------------------------------
// Ensembles

double transient_time(const JCParams& p) {
  double slowest = INFINITY;
  if (p.gamma > 0.0) slowest = std::min(slowest, p.gamma);
  if (p.kappa > 0.0) slowest = std::min(slowest, 2.0 * p.kappa);
  if (!std::isfinite(slowest)) throw ArgumentError("transient_time: need gamma > 0 or kappa > 0");
  return 10.0 / slowest;
}

TrajectoryEnsemble mcwf_ensemble(const JCParams& p, const SpaceConfig& space, double duration, std::uint32_t n_traj,
                                 std::uint64_t seed, const EnsembleOptions& options) {
  p.validate_allow_uncoupled();
  space.validate();
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ArgumentError("mcwf_ensemble: duration must be positive");
  if (n_traj < 1) throw ArgumentError("mcwf_ensemble: n_traj must be >= 1");

  const double transient = transient_time(p);
  const auto jumps = jump_operators(p, space);
  const Operator heff = effective_hamiltonian(interaction_hamiltonian(p, space), jumps);
  const Operator a = on_cavity(space, annihilation(space.n_photon_max));
  const Operator sm = on_qubit(space, pauli_lowering());
  const NoJumpPropagator prop(heff, {Operator(a.adjoint() * a), Operator(sm.adjoint() * sm)});
  const JumpSimulator sim(prop, jumps, space, transient, duration, options.track_expectations);

  std::vector<TrajectoryResult> results(n_traj);
  detail::parallel_for(n_traj, options.workers,
                       [&](std::size_t i) { results[i] = sim.run(static_cast<std::uint32_t>(i), seed); });

  TrajectoryEnsemble ens;
  ens.transient = transient;
  ens.record.duration = duration;
  ens.record.n_trajectories = n_traj;
  ens.record.seed = seed;
  std::size_t total_clicks = 0;
  for (const auto& r : results) total_clicks += r.clicks.size();
  ens.record.clicks.reserve(total_clicks);
  for (auto& r : results) {
    ens.record.clicks.insert(ens.record.clicks.end(), r.clicks.begin(), r.clicks.end());
    ens.jumps += r.jumps;
    if (options.track_expectations) ens.averages.push_back(r.averages);
  }
  return ens;
}

ClickRecord thin_record(const ClickRecord& record, double efficiency, std::uint64_t seed) {
  if (!(efficiency > 0.0) || efficiency > 1.0) {
    throw ArgumentError(fmt::format("thin_record: efficiency {} outside (0, 1]", efficiency));
  }
  ClickRecord out;
  out.duration = record.duration;
  out.n_trajectories = record.n_trajectories;
  out.seed = record.seed;
  out.clicks.reserve(record.clicks.size());
  std::uint32_t current = 0;
  auto rng = Philox4x32::substream(seed, StreamPurpose::thinning, current);
  for (const auto& c : record.clicks) {
    if (c.trajectory != current) {
      current = c.trajectory;
      rng = Philox4x32::substream(seed, StreamPurpose::thinning, current);
    }
    if (c.channel == Channel::cavity && !(rng.uniform_open() < efficiency)) continue;
    out.clicks.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Estimators

double default_bin_width(const JCParams& p) {
  if (!(p.kappa > 0.0)) throw ArgumentError("default_bin_width: kappa must be > 0");
  return 0.05 / (2.0 * p.kappa);
}

BinnedCounts bin_counts(const ClickRecord& record, double bin_width, int k_max) {
  if (!(bin_width > 0.0)) throw ArgumentError("bin_counts: bin_width must be positive");
  if (k_max < 1) throw ArgumentError("bin_counts: k_max must be >= 1");
  BinnedCounts bins;
  bins.bin_width = bin_width;
  bins.bins_per_trajectory = static_cast<std::uint64_t>(std::floor(record.duration / bin_width));
  if (bins.bins_per_trajectory * record.n_trajectories < kMinimumBins) {
    throw StatisticsError(fmt::format("bin_counts: {} bins, need at least {}",
                                      bins.bins_per_trajectory * record.n_trajectories, kMinimumBins));
  }
  bins.sums.assign(record.n_trajectories, std::vector<double>(static_cast<std::size_t>(k_max) + 1, 0.0));
  for (auto& s : bins.sums) s[0] = static_cast<double>(bins.bins_per_trajectory);

  auto flush = [&](std::uint32_t traj, std::uint64_t count) {
    if (count == 0) return;
    auto& s = bins.sums[traj];
    for (int k = 1; k <= k_max; ++k) s[static_cast<std::size_t>(k)] += falling_factorial(count, k);
  };

  bool open = false;
  std::uint32_t traj = 0;
  std::uint64_t bin = 0;
  std::uint64_t count = 0;
  for (const auto& c : record.clicks) {
    if (c.channel != Channel::cavity) continue;
    const auto b = static_cast<std::uint64_t>(std::floor(c.time / bin_width));
    if (b >= bins.bins_per_trajectory) continue;  // partial last bin
    if (!open || c.trajectory != traj || b != bin) {
      if (open) flush(traj, count);
      open = true;
      traj = c.trajectory;
      bin = b;
      count = 0;
    }
    ++count;
  }
  if (open) flush(traj, count);
  return bins;
}

std::vector<double> factorial_moments(const ClickRecord& record, double bin_width, int k_max) {
  const auto bins = bin_counts(record, bin_width, k_max);
  std::vector<double> f(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (const auto& s : bins.sums) {
    for (std::size_t k = 0; k < f.size(); ++k) f[k] += s[k];
  }
  const double total = static_cast<double>(bins.total_bins());
  for (double& x : f) x /= total;
  return f;
}

FactorialMomentEstimate estimate_factorial_moments(const ClickRecord& record, double bin_width, int k_max,
                                                   int n_bootstrap, std::uint64_t bootstrap_seed) {
  check_bootstrap(record, n_bootstrap);
  const auto bins = bin_counts(record, bin_width, k_max);
  FactorialMomentEstimate est;
  est.n_bins = bins.total_bins();
  est.value = factorial_moments(record, bin_width, k_max);
  std::vector<std::vector<double>> reps(static_cast<std::size_t>(k_max) + 1);
  bootstrap_replicates(bins, k_max, n_bootstrap, bootstrap_seed, [&](const std::vector<double>& f) {
    for (std::size_t k = 0; k < f.size(); ++k) reps[k].push_back(f[k]);
  });
  for (const auto& r : reps) est.std_error.push_back(sample_sd(r));
  return est;
}

std::vector<RatioEstimate> estimate_ratios(const ClickRecord& record, double bin_width, int k_max, int n_bootstrap,
                                           std::uint64_t bootstrap_seed) {
  if (k_max < 2) throw ArgumentError("estimate_ratios: k_max must be >= 2");
  check_bootstrap(record, n_bootstrap);
  const auto bins = bin_counts(record, bin_width, k_max);
  const auto f = factorial_moments(record, bin_width, k_max);

  auto ratio = [](const std::vector<double>& fm, int k) {
    const double d = fm[static_cast<std::size_t>(k - 1)];
    return ((fm[static_cast<std::size_t>(k)] * fm[static_cast<std::size_t>(k - 2)]) / d) / d;
  };

  std::vector<std::vector<double>> reps(static_cast<std::size_t>(k_max) + 1);
  bootstrap_replicates(bins, k_max, n_bootstrap, bootstrap_seed, [&](const std::vector<double>& fb) {
    for (int k = 2; k <= k_max; ++k) {
      if (fb[static_cast<std::size_t>(k - 1)] > 0.0) reps[static_cast<std::size_t>(k)].push_back(ratio(fb, k));
    }
  });

  std::vector<RatioEstimate> out;
  for (int k = 2; k <= k_max; ++k) {
    RatioEstimate e{k, 0.0, INFINITY, bins.total_bins(), bin_width, false};
    const auto& r = reps[static_cast<std::size_t>(k)];
    if (f[static_cast<std::size_t>(k - 1)] > 0.0 && r.size() >= 2) {
      e.value = ratio(f, k);
      e.std_error = sample_sd(r);
      e.valid = true;
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace photocorr
