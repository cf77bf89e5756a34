// photocorr: detuning scans and quantum-jump click records for the driven JC system.
//
//   photocorr scan --preset fig2 --out fig2.csv
//   photocorr simulate --preset fig2 --delta 0.7071 --duration 1e5 --trajectories 200 --out clicks.txt
//   photocorr thin --in clicks.txt --efficiency 0.5 --out thinned.txt
//   photocorr ratios --in clicks.txt --kappa 0.05
//
// Exit codes: 0 success, 1 bad input or runtime error, 2 scan finished with failed rows.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "photocorr/errors.hpp"
#include "photocorr/scan.hpp"
#include "photocorr/trajectories.hpp"
#include "photocorr/version.hpp"

namespace {

using namespace photocorr;

std::string timestamp() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) return fmt::format("{}", epoch);
  const auto now = std::chrono::system_clock::now();
  return fmt::format("{}", std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

// Opens `path` for writing, or stdout for "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw ArgumentError(fmt::format("cannot open '{}' for writing", path));
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

ClickRecord read_record(const std::string& path) {
  if (path == "-") return read_click_record(std::cin);
  std::ifstream in(path);
  if (!in) throw ArgumentError(fmt::format("cannot open '{}'", path));
  return read_click_record(in);
}

struct ScanArgs {
  std::string preset;
  std::string config;
  std::string grid;
  std::string out = "-";
  int workers = 1;
  std::optional<std::uint64_t> shuffle_seed;
};

int run_scan_cmd(const ScanArgs& a) {
  ScanConfig cfg = a.config.empty() ? figure_preset(a.preset) : load_scan_config(a.config);
  if (!a.grid.empty()) cfg.delta_over_g = Grid::parse(a.grid);
  cfg.validate();
  const auto table = run_scan(cfg, RunOptions{a.workers, a.shuffle_seed});
  Output out(a.out);
  write_spectrum_csv(out.stream(), table, CsvMetadata{std::string(kVersion), timestamp()});
  std::size_t failed = 0;
  for (const auto& r : table.rows) {
    if (r.status != RowStatus::ok) {
      ++failed;
      fmt::print(std::cerr, "row delta_over_g={:.6g} failed: {}\n", r.delta_over_g, r.diagnostics);
    }
  }
  if (failed) {
    fmt::print(std::cerr, "{} of {} rows failed\n", failed, table.rows.size());
    return 2;
  }
  return 0;
}

struct SimArgs {
  std::string preset = "fig2";
  std::optional<double> two_kappa_over_g, gamma_over_g, drive_over_kappa;
  double delta_over_g = 0.0;
  int n_photon_max = 6;
  double duration = 1e4;
  std::uint32_t trajectories = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out = "-";
};

int run_simulate_cmd(const SimArgs& a) {
  const auto base = figure_preset(a.preset).params;
  const double two_kappa = a.two_kappa_over_g.value_or(2.0 * base.kappa / base.g);
  const double gamma = a.gamma_over_g.value_or(base.gamma / base.g);
  const double drive = a.drive_over_kappa.value_or(base.drive / base.kappa);
  const auto p = JCParams::from_ratios(1.0, two_kappa, gamma, drive, a.delta_over_g);
  const auto ens = mcwf_ensemble(p, SpaceConfig{a.n_photon_max}, a.duration, a.trajectories, a.seed,
                                 EnsembleOptions{a.workers, false});
  Output out(a.out);
  write_click_record(out.stream(), ens.record);
  fmt::print(std::cerr, "{} trajectories, {} cavity clicks, {} qubit clicks, transient {:.4g}\n",
             ens.record.n_trajectories, ens.record.count(Channel::cavity), ens.record.count(Channel::qubit),
             ens.transient);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-correlation spectra of the driven Jaynes-Cummings system"};
  app.set_version_flag("--version", std::string(photocorr::kVersion));
  app.require_subcommand(1);

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "steady-state detuning scan, written as CSV");
  auto* preset_opt = scan_cmd->add_option("--preset", scan.preset, "fig1c, fig2 or fig3");
  auto* config_opt = scan_cmd->add_option("--config", scan.config, "JSON scan configuration")->check(CLI::ExistingFile);
  preset_opt->excludes(config_opt);
  scan_cmd->add_option("--grid", scan.grid, "override the detuning grid, min:max:count (units of g)");
  scan_cmd->add_option("--out,-o", scan.out, "output CSV path, '-' for stdout");
  scan_cmd->add_option("--workers,-j", scan.workers, "worker threads")->check(CLI::PositiveNumber);
  scan_cmd->add_option("--shuffle-seed", scan.shuffle_seed, "evaluate grid points in a shuffled order");

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "quantum-jump click record");
  sim_cmd->add_option("--preset", sim.preset, "parameter preset supplying defaults")->capture_default_str();
  sim_cmd->add_option("--two-kappa-over-g", sim.two_kappa_over_g);
  sim_cmd->add_option("--gamma-over-g", sim.gamma_over_g);
  sim_cmd->add_option("--drive-over-kappa", sim.drive_over_kappa);
  sim_cmd->add_option("--delta", sim.delta_over_g, "detuning in units of g")->capture_default_str();
  sim_cmd->add_option("--n-photon-max", sim.n_photon_max)->capture_default_str();
  sim_cmd->add_option("--duration", sim.duration, "recorded time per trajectory")->capture_default_str();
  sim_cmd->add_option("--trajectories", sim.trajectories)->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
  sim_cmd->add_option("--workers,-j", sim.workers)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--out,-o", sim.out);

  std::string thin_in, thin_out = "-";
  double efficiency = 1.0;
  std::uint64_t thin_seed = 1;
  auto* thin_cmd = app.add_subcommand("thin", "keep each cavity click with probability eta");
  thin_cmd->add_option("--in,-i", thin_in)->required();
  thin_cmd->add_option("--out,-o", thin_out);
  thin_cmd->add_option("--efficiency", efficiency)->required();
  thin_cmd->add_option("--seed", thin_seed)->capture_default_str();

  std::string ratios_in;
  std::optional<double> kappa, bin_width;
  int k_max = 3, n_bootstrap = 200;
  std::uint64_t boot_seed = 1;
  auto* ratios_cmd = app.add_subcommand("ratios", "estimate R_{k,k-1} from a click record");
  ratios_cmd->add_option("--in,-i", ratios_in)->required();
  auto* kappa_opt = ratios_cmd->add_option("--kappa", kappa, "cavity rate; bin width 0.05/(2 kappa)");
  auto* width_opt = ratios_cmd->add_option("--bin-width", bin_width);
  kappa_opt->excludes(width_opt);
  ratios_cmd->add_option("--k-max", k_max)->capture_default_str();
  ratios_cmd->add_option("--bootstrap", n_bootstrap)->capture_default_str();
  ratios_cmd->add_option("--seed", boot_seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*scan_cmd) {
      if (scan.preset.empty() && scan.config.empty()) throw ArgumentError("scan: give --preset or --config");
      return run_scan_cmd(scan);
    }
    if (*sim_cmd) return run_simulate_cmd(sim);
    if (*thin_cmd) {
      const auto thinned = thin_record(read_record(thin_in), efficiency, thin_seed);
      Output out(thin_out);
      write_click_record(out.stream(), thinned);
      return 0;
    }
    if (*ratios_cmd) {
      double width = 0.0;
      if (bin_width) {
        width = *bin_width;
      } else if (kappa) {
        JCParams p;
        p.kappa = *kappa;
        width = default_bin_width(p);
      } else {
        throw ArgumentError("ratios: give --kappa or --bin-width");
      }
      const auto est = estimate_ratios(read_record(ratios_in), width, k_max, n_bootstrap, boot_seed);
      fmt::print("k,R,std_error,n_bins,bin_width,valid\n");
      for (const auto& r : est) {
        fmt::print("{},{:.12g},{:.6g},{},{:.12g},{}\n", r.k, r.value, r.std_error, r.n_bins, r.bin_width,
                   r.valid ? 1 : 0);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}
