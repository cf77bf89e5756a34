#include "photocorr/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "photocorr/errors.hpp"

namespace photocorr {

namespace {

constexpr double kZeroRelTol = 1e-12;

void check_order(const MomentVector& m, int k, int lowest, const char* where) {
  if (k < lowest || k > m.k_max()) {
    throw ArgumentError(fmt::format("{}: order {} outside [{}, {}]", where, k, lowest, m.k_max()));
  }
}

}  // namespace

MomentVector::MomentVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw ArgumentError("MomentVector: need at least m_0 and m_1");
  if (std::abs(values_[0] - 1.0) > 1e-10) {
    throw ArgumentError(fmt::format("MomentVector: m_0 = {} is not 1", values_[0]));
  }
  values_[0] = 1.0;
  for (std::size_t k = 1; k < values_.size(); ++k) {
    double& v = values_[k];
    if (!std::isfinite(v)) throw ArgumentError(fmt::format("MomentVector: m_{} is not finite", k));
    if (v < 0.0) {
      if (v < -kNegativeTolerance) throw ArgumentError(fmt::format("MomentVector: m_{} = {} is negative", k, v));
      v = 0.0;
    }
  }
}

MomentVector MomentVector::from_populations(std::span<const double> populations, int k_max) {
  if (k_max < 1) throw ArgumentError("MomentVector::from_populations: k_max must be >= 1");
  std::vector<double> m(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (std::size_t n = 0; n < populations.size(); ++n) {
    double falling = 1.0;
    for (int k = 0; k <= k_max; ++k) {
      if (k > 0) falling *= static_cast<double>(n) - (k - 1);
      if (falling == 0.0) break;
      m[static_cast<std::size_t>(k)] += populations[n] * falling;
    }
  }
  // Populations sum to one only up to round-off; m_0 is exactly 1 by definition.
  m[0] = 1.0;
  return MomentVector(std::move(m));
}

MomentVector MomentVector::attenuated(double eta) const {
  if (!(eta > 0.0) || eta > 1.0) throw ArgumentError(fmt::format("attenuated: eta = {} outside (0, 1]", eta));
  std::vector<double> out(values_);
  for (std::size_t k = 1; k < out.size(); ++k) out[k] *= std::pow(eta, static_cast<double>(k));
  return MomentVector(std::move(out));
}

bool is_negligible(const MomentVector& m, int k) {
  if (k == 0) return false;
  const double m1 = m[1];
  if (!(m1 > kIntensityFloor)) return true;
  const double scale = std::max(std::pow(m1, k), m1);
  return m[k] < kZeroRelTol * scale;
}

std::vector<double> cavity_populations(const DensityMatrix& rho, const SpaceConfig& space) {
  if (rho.dim() != space.dim()) throw ArgumentError("cavity_populations: dimension mismatch");
  std::vector<double> p(static_cast<std::size_t>(space.cavity_dim()), 0.0);
  for (int n = 0; n < space.cavity_dim(); ++n) {
    const int ig = space.index(Qubit::ground, n);
    const int ie = space.index(Qubit::excited, n);
    p[static_cast<std::size_t>(n)] = rho(ig, ig).real() + rho(ie, ie).real();
  }
  return p;
}

MomentVector normally_ordered_moments(const DensityMatrix& rho, const SpaceConfig& space, int k_max) {
  if (k_max < 1) throw ArgumentError("normally_ordered_moments: k_max must be >= 1");
  if (k_max >= space.n_photon_max) {
    throw TruncationError(fmt::format("normally_ordered_moments: k_max = {} needs n_photon_max > {}, have {}",
                                      k_max, k_max, space.n_photon_max));
  }
  const auto p = cavity_populations(rho, space);
  return MomentVector::from_populations(p, k_max);
}

FlaggedValue glauber_g(const MomentVector& m, int n) {
  check_order(m, n, 2, "glauber_g");
  if (is_negligible(m, 1)) return {std::numeric_limits<double>::quiet_NaN(), false};
  // Repeated division keeps g(2) and R_{2,1} bit-identical.
  double g = m[n];
  for (int i = 0; i < n; ++i) g /= m[1];
  return {g, true};
}

double differential_c(const MomentVector& m, int n) {
  check_order(m, n, 2, "differential_c");
  return m[n] - std::pow(m[1], n);
}

FlaggedValue conditional_ratio(const MomentVector& m, int k) {
  check_order(m, k, 2, "conditional_ratio");
  if (is_negligible(m, k - 1)) return {kRatioCeiling, false};
  const double denom = m[k - 1];
  const double r = ((m[k] * m[k - 2]) / denom) / denom;
  return {std::clamp(r, kRatioFloor, kRatioCeiling), true};
}

MeasureValue correlation_measure(const MomentVector& m, int n, int n_tr) {
  if (n < 2 || n >= n_tr || n_tr > m.k_max()) {
    throw ArgumentError(fmt::format("correlation_measure: need 2 <= n < n_tr <= k_max, got n={}, n_tr={}, k_max={}",
                                    n, n_tr, m.k_max()));
  }
  double product = 1.0;
  bool degenerate = false;
  for (int k = 2; k <= n_tr; ++k) {
    const auto r = conditional_ratio(m, k);
    if (!r.valid) {
      degenerate = true;
      continue;
    }
    // a ratio within rounding of 1 is 1: neither surge nor blockade
    if (std::abs(r.value - 1.0) <= kRatioUnityTolerance) {
      product = 0.0;
      continue;
    }
    const double factor = k <= n ? std::max(r.value - 1.0, 0.0) : std::max(1.0 / r.value - 1.0, 0.0);
    product *= factor;
  }
  if (degenerate) return {0.0, true};
  return {product, false};
}

std::vector<bool> classical_bound_check(const MomentVector& m, double tol) {
  if (m.k_max() < 2) throw ArgumentError("classical_bound_check: k_max must be >= 2");
  std::vector<bool> violated;
  violated.reserve(static_cast<std::size_t>(m.k_max() - 1));
  for (int k = 2; k <= m.k_max(); ++k) {
    const auto r = conditional_ratio(m, k);
    violated.push_back(r.valid && r.value < 1.0 - tol);
  }
  return violated;
}

std::vector<double> excitation_probabilities(const DensityMatrix& rho, const SpaceConfig& space, int n_max) {
  if (rho.dim() != space.dim()) throw ArgumentError("excitation_probabilities: dimension mismatch");
  if (n_max < 0 || n_max > space.n_photon_max) {
    throw ArgumentError(fmt::format("excitation_probabilities: n_max = {} outside [0, {}]", n_max, space.n_photon_max));
  }
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int n = 0; n <= n_max; ++n) {
    const int ig = space.index(Qubit::ground, n);
    double pn = rho(ig, ig).real();
    if (n >= 1) {
      const int ie = space.index(Qubit::excited, n - 1);
      pn += rho(ie, ie).real();
    }
    p[static_cast<std::size_t>(n)] = pn;
  }
  return p;
}

CorrelationReport correlation_report(const MomentVector& m, std::span<const MeasureOrder> orders) {
  CorrelationReport rep;
  rep.k_max = m.k_max();
  for (int n = 2; n <= m.k_max(); ++n) {
    rep.g.push_back(glauber_g(m, n));
    rep.c.push_back(differential_c(m, n));
    rep.ratios.push_back(conditional_ratio(m, n));
  }
  rep.orders.assign(orders.begin(), orders.end());
  for (const auto& o : orders) rep.measures.push_back(correlation_measure(m, o.n, o.n_tr));
  return rep;
}

}  // namespace photocorr
