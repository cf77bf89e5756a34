#pragma once

// Photon-correlation quantities built from normally ordered moments m_k = <a^dag^k a^k>:
// Glauber g(n), the differential correlation C(n), conditional ratios R_{k,k-1}, and the
// n-photon correlation measure M_n that combines surge (R > 1, k <= n) and blockade
// (R < 1, n < k <= N_tr) conditions.

#include <span>
#include <vector>

#include "photocorr/hilbert.hpp"

namespace photocorr {

/// m_0..m_kmax with m_0 = 1. Values within kNegativeTolerance below zero are clipped to 0.
class MomentVector {
 public:
  static constexpr double kNegativeTolerance = 1e-12;

  explicit MomentVector(std::vector<double> values);

  /// Factorial moments of a photon-number distribution p_0, p_1, ...
  static MomentVector from_populations(std::span<const double> populations, int k_max);

  int k_max() const noexcept { return static_cast<int>(values_.size()) - 1; }
  double operator[](int k) const { return values_.at(static_cast<std::size_t>(k)); }
  const std::vector<double>& values() const noexcept { return values_; }

  /// m_k -> eta^k m_k: the moments seen through a lossy channel of transmission eta.
  MomentVector attenuated(double eta) const;

 private:
  std::vector<double> values_;
};

/// Value plus a validity flag; invalid values come from moments below the zero tolerance.
struct FlaggedValue {
  double value;
  bool valid;
};

struct MeasureValue {
  double value;
  bool degenerate;  ///< an ingredient ratio was invalid; value forced to 0
};

struct MeasureOrder {
  int n;
  int n_tr;
};

inline constexpr double kRatioFloor = 1e-12;
inline constexpr double kRatioCeiling = 1e12;
inline constexpr double kIntensityFloor = 1e-30;
/// |R - 1| at or below this counts as R = 1 in M_n (round-off of exactly Poissonian moments).
inline constexpr double kRatioUnityTolerance = 1e-12;

/// m_k counts as zero when m_1 <= kIntensityFloor or m_k < 1e-12 * max(m_1^k, m_1).
bool is_negligible(const MomentVector& m, int k);

/// Reduced cavity Fock populations p_n = sum_q rho(|n,q>, |n,q>).
std::vector<double> cavity_populations(const DensityMatrix& rho, const SpaceConfig& space);

/// m_k = sum_n p_n n (n-1) ... (n-k+1). Throws TruncationError if k_max >= n_photon_max.
MomentVector normally_ordered_moments(const DensityMatrix& rho, const SpaceConfig& space, int k_max);

/// g(n)(0) = m_n / m_1^n; invalid (NaN) when m_1 is negligible.
FlaggedValue glauber_g(const MomentVector& m, int n);

/// C(n)(0) = m_n - m_1^n.
double differential_c(const MomentVector& m, int n);

/// R_{k,k-1} = m_k m_{k-2} / m_{k-1}^2 clamped to [1e-12, 1e12]; invalid when m_{k-1} is negligible.
FlaggedValue conditional_ratio(const MomentVector& m, int k);

/// M_n = prod_{k=2..n} max(R-1, 0) * prod_{k=n+1..n_tr} max(1/R - 1, 0).
MeasureValue correlation_measure(const MomentVector& m, int n, int n_tr);

/// Entry k-2 is true iff R_{k,k-1} < 1 - tol, i.e. the Cauchy-Schwarz bound obeyed by every
/// positive-P field is violated at order k.
std::vector<bool> classical_bound_check(const MomentVector& m, double tol = 1e-10);

/// Population of each total-excitation manifold {|n,g>, |n-1,e>} for n = 0..n_max.
std::vector<double> excitation_probabilities(const DensityMatrix& rho, const SpaceConfig& space, int n_max);

struct CorrelationReport {
  int k_max = 0;
  std::vector<FlaggedValue> g;       ///< index n-2, n = 2..k_max
  std::vector<double> c;             ///< index n-2
  std::vector<FlaggedValue> ratios;  ///< index k-2, k = 2..k_max
  std::vector<MeasureOrder> orders;
  std::vector<MeasureValue> measures;  ///< parallel to orders
};

CorrelationReport correlation_report(const MomentVector& m, std::span<const MeasureOrder> orders);

}  // namespace photocorr
