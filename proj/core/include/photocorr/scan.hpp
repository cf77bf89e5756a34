#pragma once

// Detuning sweeps of the driven JC system: one steady-state solve per grid point, with
// automatic truncation escalation, assembled into a table of correlation quantities.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "photocorr/jc_model.hpp"
#include "photocorr/moments.hpp"

namespace photocorr {

struct Grid {
  double min = -1.5;
  double max = 1.5;
  int count = 301;

  /// Parses "min:max:count".
  static Grid parse(std::string_view text);
  void validate() const;
  std::vector<double> points() const;
  double step() const noexcept { return (max - min) / (count - 1); }
};

struct ScanConfig {
  std::string name = "custom";
  JCParams params;  ///< rates in units of g; delta is taken from the grid
  Grid delta_over_g;
  int n_photon_max = 12;
  int k_max = 5;
  std::vector<MeasureOrder> measure_orders;
  std::vector<std::string> outputs;  ///< CSV columns to emit; empty means all

  void validate() const;
  /// All column names this configuration can produce, in CSV order.
  std::vector<std::string> available_columns() const;
};

/// fig1c, fig2 or fig3. Throws ArgumentError for anything else.
ScanConfig figure_preset(std::string_view name);

inline constexpr double kTailTolerance = 1e-8;
inline constexpr int kTruncationStep = 5;
inline constexpr int kMaxEscalations = 3;

enum class RowStatus { ok, failed };

struct SpectrumRow {
  double delta_over_g = 0.0;
  RowStatus status = RowStatus::failed;
  std::string diagnostics;
  int n_photon_max = 0;  ///< truncation actually used
  double residual = INFINITY;
  double truncation_tail = INFINITY;
  std::optional<MomentVector> moments;
  CorrelationReport report;
};

struct SpectrumTable {
  ScanConfig config;
  std::vector<SpectrumRow> rows;  ///< sorted by delta

  bool all_ok() const;
  std::vector<double> deltas() const;
  /// Values of a named column; NaN for failed rows. Throws ArgumentError for unknown names.
  std::vector<double> column(std::string_view name) const;
};

struct RunOptions {
  int workers = 1;
  std::optional<std::uint64_t> shuffle_seed;  ///< evaluate grid points in a permuted order
};

/// Solves one detuning, escalating n_photon_max by 5 (at most 3 times) until the tail is small.
SpectrumRow solve_point(const ScanConfig& cfg, double delta_over_g);

SpectrumTable run_scan(const ScanConfig& cfg, const RunOptions& options = {});

/// Value of a named column in one row (NaN when failed).
double row_value(const SpectrumRow& row, const ScanConfig& cfg, std::string_view name);

struct Peak {
  double delta_over_g;
  double value;
};

/// Strict interior local maxima with value >= rel_floor * max(column).
std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y, double rel_floor = 0.05);
std::vector<Peak> find_peaks(const SpectrumTable& table, std::string_view column, double rel_floor = 0.05);

struct CsvMetadata {
  std::string version;
  std::string timestamp;
};

/// '#'-prefixed preamble (config echo, version, timestamp, per-row diagnostics), a header row,
/// then one row per detuning with 12 significant digits.
void write_spectrum_csv(std::ostream& out, const SpectrumTable& table, const CsvMetadata& meta);

/// JSON object mirroring ScanConfig: name, params {g, kappa, gamma, drive | two_kappa_over_g,
/// gamma_over_g, drive_over_kappa}, delta_over_g ({min,max,count} or "min:max:count"),
/// n_photon_max, k_max, measure_orders [{n, n_tr}], outputs. An optional "preset" supplies defaults.
ScanConfig parse_scan_config(std::string_view json_text);
ScanConfig load_scan_config(const std::string& path);

}  // namespace photocorr
