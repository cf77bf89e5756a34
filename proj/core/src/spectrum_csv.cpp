#include <algorithm>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "photocorr/errors.hpp"
#include "photocorr/scan.hpp"

namespace photocorr {

void write_spectrum_csv(std::ostream& out, const SpectrumTable& table, const CsvMetadata& meta) {
  const auto& cfg = table.config;
  const auto& p = cfg.params;
  const auto all = cfg.available_columns();
  std::vector<std::string> cols{"delta_over_g"};
  if (cfg.outputs.empty()) {
    cols = all;
  } else {
    for (const auto& c : cfg.outputs) {
      if (c != "delta_over_g") cols.push_back(c);
    }
  }

  fmt::print(out, "# photocorr spectrum\n");
  fmt::print(out, "# version={}\n", meta.version);
  fmt::print(out, "# timestamp={}\n", meta.timestamp);
  fmt::print(out, "# config.name={}\n", cfg.name);
  fmt::print(out, "# config.g={:.12g}\n# config.kappa={:.12g}\n# config.gamma={:.12g}\n# config.drive={:.12g}\n", p.g,
             p.kappa, p.gamma, p.drive);
  fmt::print(out, "# config.delta_over_g={:.12g}:{:.12g}:{}\n", cfg.delta_over_g.min, cfg.delta_over_g.max,
             cfg.delta_over_g.count);
  fmt::print(out, "# config.n_photon_max={}\n# config.k_max={}\n", cfg.n_photon_max, cfg.k_max);
  for (const auto& o : cfg.measure_orders) fmt::print(out, "# config.measure_order=M{}(N_tr={})\n", o.n, o.n_tr);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    fmt::print(out, "# row {} delta_over_g={:.12g} status={} n_photon_max={} residual={:.3e} truncation_tail={:.3e}", i,
               r.delta_over_g, r.status == RowStatus::ok ? "ok" : "failed", r.n_photon_max, r.residual,
               r.truncation_tail);
    if (!r.diagnostics.empty()) fmt::print(out, " {}", r.diagnostics);
    fmt::print(out, "\n");
  }

  fmt::print(out, "{}\n", fmt::join(cols, ","));
  std::vector<std::size_t> pos;
  for (const auto& c : cols) pos.push_back(static_cast<std::size_t>(std::find(all.begin(), all.end(), c) - all.begin()));
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out << ',';
      const double v = pos[i] == 0 ? r.delta_over_g : row_value(r, cfg, all[pos[i]]);
      fmt::print(out, "{:.12g}", v);
    }
    out << '\n';
  }
}

}  // namespace photocorr
