#include "photocorr/scan.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <fmt/format.h>

#include "photocorr/errors.hpp"
#include "photocorr/lindblad.hpp"
#include "photocorr/philox.hpp"
#include "parallel.hpp"

namespace photocorr {

namespace {

double parse_double(std::string_view s, std::string_view what) {
  std::string tmp(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tmp, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != tmp.size()) throw ArgumentError(fmt::format("grid: cannot parse {} '{}'", what, s));
  return v;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> row_values(const SpectrumRow& row, const ScanConfig& cfg) {
  const auto n_cols = cfg.available_columns().size() - 1;  // without delta_over_g
  if (row.status != RowStatus::ok || !row.moments) return std::vector<double>(n_cols, kNaN);
  std::vector<double> v;
  v.reserve(n_cols);
  const auto& m = *row.moments;
  for (int k = 1; k <= cfg.k_max; ++k) v.push_back(m[k]);
  for (const auto& g : row.report.g) v.push_back(g.value);
  for (double c : row.report.c) v.push_back(c);
  for (const auto& r : row.report.ratios) v.push_back(r.value);
  for (const auto& mv : row.report.measures) v.push_back(mv.value);
  return v;
}

std::string flag_notes(const SpectrumRow& row) {
  std::string notes;
  auto add = [&](const std::string& s) {
    if (!notes.empty()) notes += ',';
    notes += s;
  };
  for (std::size_t i = 0; i < row.report.g.size(); ++i) {
    if (!row.report.g[i].valid) add(fmt::format("g{}", i + 2));
  }
  for (std::size_t i = 0; i < row.report.ratios.size(); ++i) {
    if (!row.report.ratios[i].valid) add(fmt::format("r{}{}", i + 2, i + 1));
  }
  for (std::size_t i = 0; i < row.report.measures.size(); ++i) {
    if (row.report.measures[i].degenerate) add(fmt::format("M{}", row.report.orders[i].n));
  }
  return notes.empty() ? std::string{} : "invalid=" + notes;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Grid and configuration

Grid Grid::parse(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos) {
    throw ArgumentError(fmt::format("grid: expected 'min:max:count', got '{}'", text));
  }
  Grid g;
  g.min = parse_double(text.substr(0, a), "min");
  g.max = parse_double(text.substr(a + 1, b - a - 1), "max");
  const auto count_text = text.substr(b + 1);
  int count = 0;
  const auto res = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
  if (res.ec != std::errc{} || res.ptr != count_text.data() + count_text.size()) {
    throw ArgumentError(fmt::format("grid: cannot parse count '{}'", count_text));
  }
  g.count = count;
  g.validate();
  return g;
}

void Grid::validate() const {
  if (count < 2) throw ArgumentError(fmt::format("grid: count must be >= 2, got {}", count));
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
    throw ArgumentError(fmt::format("grid: need finite min < max, got {}:{}", min, max));
  }
}

std::vector<double> Grid::points() const {
  validate();
  std::vector<double> x(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) x[static_cast<std::size_t>(i)] = min + (max - min) * i / (count - 1);
  x.back() = max;
  return x;
}

std::vector<std::string> ScanConfig::available_columns() const {
  std::vector<std::string> cols{"delta_over_g"};
  for (int k = 1; k <= k_max; ++k) cols.push_back(fmt::format("m{}", k));
  for (int n = 2; n <= k_max; ++n) cols.push_back(fmt::format("g{}", n));
  for (int n = 2; n <= k_max; ++n) cols.push_back(fmt::format("c{}", n));
  for (int k = 2; k <= k_max; ++k) cols.push_back(fmt::format("r{}{}", k, k - 1));
  for (const auto& o : measure_orders) cols.push_back(fmt::format("M{}", o.n));
  return cols;
}

void ScanConfig::validate() const {
  params.validate();
  delta_over_g.validate();
  SpaceConfig{n_photon_max}.validate();
  if (k_max < 2) throw ArgumentError(fmt::format("scan config: k_max must be >= 2, got {}", k_max));
  if (k_max >= n_photon_max) {
    throw ArgumentError(fmt::format("scan config: k_max ({}) must be < n_photon_max ({})", k_max, n_photon_max));
  }
  for (const auto& o : measure_orders) {
    if (o.n < 2 || o.n >= o.n_tr || o.n_tr > k_max) {
      throw ArgumentError(fmt::format("scan config: measure order n={} with N_tr={} needs 2 <= n < N_tr <= k_max={}",
                                      o.n, o.n_tr, k_max));
    }
    const auto dup = std::count_if(measure_orders.begin(), measure_orders.end(),
                                   [&](const MeasureOrder& other) { return other.n == o.n; });
    if (dup > 1) throw ArgumentError(fmt::format("scan config: measure order n={} listed twice", o.n));
  }
  const auto cols = available_columns();
  for (const auto& name : outputs) {
    if (std::find(cols.begin(), cols.end(), name) == cols.end()) {
      throw ArgumentError(fmt::format("scan config: unknown output column '{}'", name));
    }
  }
}

ScanConfig figure_preset(std::string_view name) {
  ScanConfig cfg;
  cfg.name = std::string(name);
  cfg.delta_over_g = Grid{-1.5, 1.5, 301};
  cfg.k_max = 5;
  if (name == "fig1c") {
    cfg.params = JCParams::from_ratios(1.0, 0.01, 0.01, 0.1);
    cfg.n_photon_max = 12;
    cfg.measure_orders = {{2, 4}, {3, 5}, {4, 5}};
  } else if (name == "fig2") {
    cfg.params = JCParams::from_ratios(1.0, 0.1, 0.1, 0.1);
    cfg.n_photon_max = 12;
    cfg.measure_orders = {{2, 4}, {3, 5}, {4, 5}};
  } else if (name == "fig3") {
    cfg.params = JCParams::from_ratios(1.0, 0.1, 0.1, 1.0);
    cfg.n_photon_max = 20;
    cfg.measure_orders = {{2, 4}, {3, 5}};
  } else {
    throw ArgumentError(fmt::format("unknown preset '{}' (expected fig1c, fig2 or fig3)", name));
  }
  return cfg;
}

// ---------------------------------------------------------------------------------------------
// Solving

SpectrumRow solve_point(const ScanConfig& cfg, double delta_over_g) {
  SpectrumRow row;
  row.delta_over_g = delta_over_g;
  JCParams p = cfg.params;
  p.delta = delta_over_g * p.g;

  int n_max = cfg.n_photon_max;
  for (int attempt = 0; attempt <= kMaxEscalations; ++attempt, n_max += kTruncationStep) {
    const SpaceConfig space{n_max};
    row.n_photon_max = n_max;
    try {
      const auto l = build_liouvillian(interaction_hamiltonian(p, space), p, space);
      auto ss = steady_state(l);
      row.residual = ss.residual;
      row.truncation_tail = ss.truncation_tail;
      if (!(ss.truncation_tail < kTailTolerance)) continue;
      row.moments = normally_ordered_moments(ss.rho, space, cfg.k_max);
      row.report = correlation_report(*row.moments, cfg.measure_orders);
      row.status = RowStatus::ok;
      row.diagnostics = flag_notes(row);
      return row;
    } catch (const SolverError& e) {
      row.status = RowStatus::failed;
      row.diagnostics = fmt::format("solver: {}", e.what());
      return row;
    }
  }
  row.status = RowStatus::failed;
  row.moments.reset();
  row.diagnostics = fmt::format("truncation escalation exhausted at n_photon_max={} (tail {:.3e})", row.n_photon_max,
                                row.truncation_tail);
  return row;
}

SpectrumTable run_scan(const ScanConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const auto deltas = cfg.delta_over_g.points();
  std::vector<std::size_t> order(deltas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (options.shuffle_seed) {
    auto rng = Philox4x32::substream(*options.shuffle_seed, StreamPurpose::bootstrap, 0xffffu);
    std::shuffle(order.begin(), order.end(), rng);
  }

  SpectrumTable table;
  table.config = cfg;
  table.rows.resize(deltas.size());
  detail::parallel_for(order.size(), options.workers, [&](std::size_t j) {
    const std::size_t idx = order[j];
    table.rows[idx] = solve_point(cfg, deltas[idx]);
  });
  return table;
}

bool SpectrumTable::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const SpectrumRow& r) { return r.status == RowStatus::ok; });
}

std::vector<double> SpectrumTable::deltas() const {
  std::vector<double> d;
  d.reserve(rows.size());
  for (const auto& r : rows) d.push_back(r.delta_over_g);
  return d;
}

double row_value(const SpectrumRow& row, const ScanConfig& cfg, std::string_view name) {
  if (name == "delta_over_g") return row.delta_over_g;
  const auto cols = cfg.available_columns();
  const auto it = std::find(cols.begin(), cols.end(), name);
  if (it == cols.end()) throw ArgumentError(fmt::format("unknown column '{}'", name));
  const auto values = row_values(row, cfg);
  return values[static_cast<std::size_t>(it - cols.begin()) - 1];
}

std::vector<double> SpectrumTable::column(std::string_view name) const {
  const auto cols = config.available_columns();
  const auto it = std::find(cols.begin(), cols.end(), name);
  if (it == cols.end()) throw ArgumentError(fmt::format("unknown column '{}'", name));
  const auto pos = static_cast<std::size_t>(it - cols.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(pos == 0 ? r.delta_over_g : row_values(r, config)[pos - 1]);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Peaks

std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y, double rel_floor) {
  if (x.size() != y.size()) throw ArgumentError("find_peaks: x and y differ in length");
  if (y.size() < 5) throw ArgumentError("find_peaks: need at least 5 grid points");
  double top = -INFINITY;
  for (double v : y) {
    if (std::isfinite(v)) top = std::max(top, v);
  }
  std::vector<Peak> peaks;
  if (!(top > 0.0)) return peaks;
  const double floor = rel_floor * top;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] > y[i - 1] && y[i] > y[i + 1] && y[i] >= floor) peaks.push_back({x[i], y[i]});
  }
  return peaks;
}

std::vector<Peak> find_peaks(const SpectrumTable& table, std::string_view column, double rel_floor) {
  const auto y = table.column(column);
  const auto x = table.deltas();
  return find_peaks(x, y, rel_floor);
}

}  // namespace photocorr
