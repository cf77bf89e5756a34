// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion; exit status is the
// number of failures. Set PHOTOCORR_ACCEPT_WORKERS to parallelize scans and ensembles.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "photocorr/lindblad.hpp"
#include "photocorr/moments.hpp"
#include "photocorr/scan.hpp"
#include "photocorr/trajectories.hpp"

using namespace photocorr;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int workers() {
  const char* env = std::getenv("PHOTOCORR_ACCEPT_WORKERS");
  return env ? std::max(1, std::atoi(env)) : 1;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Scans are shared between criteria; the CSV text of each is kept for the determinism check.
struct PresetRun {
  SpectrumTable table;
  std::string csv;
  double seconds;
};

std::string to_csv(const SpectrumTable& t) {
  std::ostringstream out;
  write_spectrum_csv(out, t, CsvMetadata{"acceptance", "0"});
  return out.str();
}

PresetRun run_preset(std::string_view name, int n_workers) {
  const auto t0 = std::chrono::steady_clock::now();
  auto table = run_scan(figure_preset(name), RunOptions{n_workers, std::nullopt});
  const double s = seconds_since(t0);
  auto text = to_csv(table);
  return {std::move(table), std::move(text), s};
}

std::size_t nearest(const std::vector<double>& x, double v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs(x[i] - v) < std::abs(x[best] - v)) best = i;
  }
  return best;
}

bool has_peak_near(const std::vector<Peak>& peaks, double where, double tol) {
  for (const auto& p : peaks) {
    if (std::abs(p.delta_over_g - where) <= tol) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------------------------

Outcome empty_cavity_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const SpaceConfig s{12};
  double worst = 0.0;
  for (double delta_over_kappa : {0.0, 0.5, 2.0}) {
    JCParams p;
    p.g = 0.0;
    p.gamma = 0.0;
    p.kappa = 0.05;
    p.drive = 0.1 * p.kappa;
    p.delta = delta_over_kappa * p.kappa;
    const auto l = build_liouvillian(interaction_hamiltonian(p, s), p, s);
    const auto ss = steady_state(l, DensityMatrix::pure(basis_state(s, Qubit::ground, 0)));
    const Complex alpha = p.drive / Complex(p.kappa, p.delta);
    const Complex a = expectation(ss.rho, on_cavity(s, annihilation(s.n_photon_max)));
    worst = std::max(worst, std::abs(a - alpha) / std::abs(alpha));
    const auto m = normally_ordered_moments(ss.rho, s, 4);
    for (int k = 1; k <= 4; ++k) worst = std::max(worst, std::abs(m[k] / std::pow(std::norm(alpha), k) - 1.0));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-8 && secs < 1.0, fmt::format("max relative error {:.2e}, {:.3f} s", worst, secs)};
}

Outcome fig1c_peaks(const PresetRun& run) {
  const auto& t = run.table;
  const double step = t.config.delta_over_g.step() + 1e-12;
  std::string detail;
  bool ok = t.all_ok() && run.seconds < 120.0;
  for (int n = 1; n <= 4; ++n) {
    const auto peaks = find_peaks(t, fmt::format("m{}", n));
    const double target = 1.0 / std::sqrt(static_cast<double>(n));
    const bool found = has_peak_near(peaks, target, step) && has_peak_near(peaks, -target, step);
    ok = ok && found;
    detail += fmt::format("m{}:{} ", n, found ? "ok" : "missing");
  }
  return {ok, detail + fmt::format("({:.1f} s single-threaded)", run.seconds)};
}

Outcome fig2_measure(const PresetRun& run) {
  const auto& t = run.table;
  const auto x = t.deltas();
  const auto m2 = t.column("M2");
  const auto m3 = t.column("M3");
  const double m2_zero = m2[nearest(x, 0.0)];
  const double m2_res = m2[nearest(x, kInvSqrt2)];
  const double target3 = 1.0 / std::sqrt(3.0);
  // "near g/sqrt(3)": positive at some grid point within 0.05 g of either resonance
  bool m3_near = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(std::abs(x[i]) - target3) <= 0.05 && m3[i] > 0.0) m3_near = true;
  }
  double lo = INFINITY, hi = -INFINITY;
  bool support_ok = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(m2[i] > 0.0)) continue;
    lo = std::min(lo, std::abs(x[i]));
    hi = std::max(hi, std::abs(x[i]));
    if (std::abs(std::abs(x[i]) - kInvSqrt2) > 0.15) support_ok = false;
  }
  const bool ok = t.all_ok() && m2_zero == 0.0 && m2_res > 0.0 && m3_near && support_ok;
  return {ok, fmt::format("M2(0)={} M2(g/sqrt2)={:.4g} M3>0 near g/sqrt3: {}; |delta| support of M2>0 = [{:.2f}, {:.2f}] "
                          "vs allowed [{:.3f}, {:.3f}]",
                          m2_zero, m2_res, m3_near ? "yes" : "no", lo, hi, kInvSqrt2 - 0.15, kInvSqrt2 + 0.15)};
}

Outcome fig3_contrast(const PresetRun& run) {
  const auto& t = run.table;
  const auto x = t.deltas();
  const auto g2 = t.column("g2");
  std::size_t arg = 0;
  for (std::size_t i = 1; i < g2.size(); ++i) {
    if (g2[i] > g2[arg]) arg = i;
  }
  const auto peaks = find_peaks(t, "M2");
  bool all_near = !peaks.empty();
  std::string where;
  for (const auto& p : peaks) {
    all_near = all_near && std::abs(std::abs(p.delta_over_g) - kInvSqrt2) <= 0.15;
    where += fmt::format("{:+.2f} ", p.delta_over_g);
  }
  const bool both = has_peak_near(peaks, kInvSqrt2, 0.15) && has_peak_near(peaks, -kInvSqrt2, 0.15);
  const bool ok = t.all_ok() && std::abs(x[arg]) < 0.05 && all_near && both;
  return {ok, fmt::format("argmax g2 at delta={:+.2f}; M2 peaks at {}", x[arg], where)};
}

Outcome classicality_guard() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n_max = 120;
  const MeasureOrder orders[] = {{2, 3}, {2, 4}, {2, 5}, {3, 4}, {3, 5}, {4, 5}};
  int failures = 0;
  double min_ratio = INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> pops(n_max + 1, 0.0);
    const int parts = 1 + static_cast<int>(u(rng) * 4);
    double wsum = 0.0;
    for (int j = 0; j < parts; ++j) {
      const double w = u(rng) + 1e-3;
      const double mean = 4.0 * u(rng) + 1e-3;
      wsum += w;
      if (u(rng) < 0.5) {
        double term = std::exp(-mean);  // coherent: Poisson
        for (int n = 0; n <= n_max; ++n, term *= mean / n) pops[static_cast<std::size_t>(n)] += w * term;
      } else {
        const double r = mean / (1.0 + mean);  // thermal: geometric
        for (int n = 0; n <= n_max; ++n) pops[static_cast<std::size_t>(n)] += w * std::pow(r, n) / (1.0 + mean);
      }
    }
    for (double& p : pops) p /= wsum;
    const auto m = MomentVector::from_populations(pops, 5);
    bool bad = false;
    for (int k = 2; k <= 5; ++k) {
      const auto r = conditional_ratio(m, k);
      min_ratio = std::min(min_ratio, r.value);
      bad = bad || !(r.value >= 1.0 - 1e-10);
    }
    for (const auto& o : orders) bad = bad || correlation_measure(m, o.n, o.n_tr).value != 0.0;
    failures += bad;
  }
  return {failures == 0, fmt::format("200 mixtures, {} failures, min R = {:.12f}", failures, min_ratio)};
}

Outcome weak_drive_relation() {
  const auto p = JCParams::from_ratios(1.0, 0.01, 0.01, 0.01, kInvSqrt2);
  const SpaceConfig s{12};
  const auto ss = steady_state(build_liouvillian(interaction_hamiltonian(p, s), p, s));
  const auto m = normally_ordered_moments(ss.rho, s, 3);
  const auto pn = excitation_probabilities(ss.rho, s, 3);
  bool ok = true;
  std::string detail;
  for (int n = 1; n <= 3; ++n) {
    const double r = m[n] / (std::tgamma(n + 1.0) * pn[static_cast<std::size_t>(n)]);
    ok = ok && r >= 0.95 && r <= 1.05;
    detail += fmt::format("n={}: {:.5f} ", n, r);
  }
  return {ok, detail};
}

Outcome efficiency_algebraic() {
  // The degeneracy floor 1e-12*max(m1^k, m1) is not homogeneous in eta, so a ratio near it
  // can switch between defined and degenerate; such flips are counted but only defined
  // ratios carry a value to compare.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logu(-6.0, 1.0);
  long mismatches = 0;
  long compared = 0;
  long flips = 0;
  double worst_general = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> v{1.0};
    for (int k = 1; k <= 5; ++k) v.push_back(std::pow(10.0, logu(rng)) * v.back());
    const MomentVector m(v);
    for (double eta : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
      const auto ma = m.attenuated(eta);
      for (int k = 2; k <= 5; ++k) {
        const auto a = conditional_ratio(ma, k);
        const auto b = conditional_ratio(m, k);
        if (a.valid != b.valid) {
          ++flips;
        } else if (a.valid) {
          ++compared;
          mismatches += a.value != b.value;
        }
      }
    }
    const double eta = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    const auto ma = m.attenuated(eta);
    for (int k = 2; k <= 5; ++k) {
      const auto a = conditional_ratio(ma, k);
      const auto b = conditional_ratio(m, k);
      if (a.valid && b.valid) worst_general = std::max(worst_general, std::abs(a.value / b.value - 1.0));
    }
  }
  return {mismatches == 0 && compared > 0,
          fmt::format("binary-exact eta: {} non-identical of {} defined ratios ({} switched defined/degenerate at the "
                      "moment floor); arbitrary eta: max relative change {:.1e}",
                      mismatches, compared, flips, worst_general)};
}

struct TrajectoryRun {
  TrajectoryEnsemble ensemble;
  double seconds;
};

TrajectoryRun fig2_ensemble(double delta_over_g, double duration, std::uint32_t n_traj, std::uint64_t seed,
                            bool track) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = JCParams::from_ratios(1.0, 0.1, 0.1, 0.1, delta_over_g);
  auto ens = mcwf_ensemble(p, SpaceConfig{6}, duration, n_traj, seed, EnsembleOptions{workers(), track});
  return {std::move(ens), seconds_since(t0)};
}

Outcome efficiency_empirical(const TrajectoryRun& run) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& full = run.ensemble.record;
  const auto half = thin_record(full, 0.5, 4242);
  const double width = default_bin_width(JCParams::from_ratios(1.0, 0.1, 0.1, 0.1));
  const int n_boot = 400;
  const auto r1 = estimate_ratios(full, width, 2, n_boot, 1)[0];
  const auto r05 = estimate_ratios(half, width, 2, n_boot, 1)[0];
  const auto f1 = estimate_factorial_moments(full, width, 2, n_boot, 2);
  const auto f05 = estimate_factorial_moments(half, width, 2, n_boot, 2);
  const double secs = run.seconds + seconds_since(t0);
  const double dr = std::abs(r1.value - r05.value);
  const double sr = std::sqrt(r1.std_error * r1.std_error + r05.std_error * r05.std_error);
  const double df = std::abs(f05.value[2] - 0.25 * f1.value[2]);
  const double sf = std::sqrt(f05.std_error[2] * f05.std_error[2] + 0.0625 * f1.std_error[2] * f1.std_error[2]);
  const bool ok = r1.valid && r05.valid && full.n_trajectories >= 2000 && dr <= 3.0 * sr && df <= 3.0 * sf &&
                  secs < 900.0;
  return {ok, fmt::format("{} traj, R21(eta=1)={:.1f}+-{:.1f}, R21(eta=0.5)={:.1f}+-{:.1f} ({:.2f} sigma); "
                          "F2(0.5)/F2(1)={:.3f} ({:.2f} sigma from 0.25); {:.0f} s",
                          full.n_trajectories, r1.value, r1.std_error, r05.value, r05.std_error, dr / sr,
                          f05.value[2] / f1.value[2], df / sf, secs)};
}

Outcome unraveling(const TrajectoryRun& resonant, const TrajectoryRun& two_photon) {
  bool ok = true;
  std::string detail;
  const std::pair<const TrajectoryRun*, double> runs[] = {{&resonant, 0.0}, {&two_photon, kInvSqrt2}};
  for (const auto& [run, delta] : runs) {
    const auto& ens = run->ensemble;
    const auto p = JCParams::from_ratios(1.0, 0.1, 0.1, 0.1, delta);
    const SpaceConfig s{12};
    const auto ss = steady_state(build_liouvillian(interaction_hamiltonian(p, s), p, s));
    const double n_ss = expectation(ss.rho, on_cavity(s, number_operator(s.n_photon_max))).real();
    double mean = 0.0, var = 0.0;
    for (const auto& a : ens.averages) mean += a.photon_number;
    mean /= static_cast<double>(ens.averages.size());
    for (const auto& a : ens.averages) var += (a.photon_number - mean) * (a.photon_number - mean);
    const double se = std::sqrt(var / static_cast<double>(ens.averages.size() - 1) / static_cast<double>(ens.averages.size()));
    const double z = std::abs(mean - n_ss) / se;
    ok = ok && z <= 3.0;
    detail += fmt::format("delta={:.3f}: traj {:.4e} +- {:.1e} vs ss {:.4e} ({:.2f} sigma); ", delta, mean, se, n_ss, z);
  }
  return {ok, detail};
}

Outcome determinism(const PresetRun& fig1c, const PresetRun& fig2, const PresetRun& fig3) {
  bool ok = true;
  std::string detail;
  for (const auto* run : {&fig1c, &fig2, &fig3}) {
    const auto again = run_preset(run->table.config.name, 2);
    const bool same = again.csv == run->csv;
    ok = ok && same;
    detail += fmt::format("{} {}; ", run->table.config.name, same ? "identical" : "DIFFERS");
  }
  const auto p = JCParams::from_ratios(1.0, 0.1, 0.1, 1.0, kInvSqrt2);
  std::string texts[2];
  for (int i = 0; i < 2; ++i) {
    std::ostringstream out;
    write_click_record(out, mcwf_ensemble(p, SpaceConfig{8}, 2e4, 64, 31337, EnsembleOptions{1 + 3 * i, false}).record);
    texts[i] = out.str();
  }
  const bool traj_same = texts[0] == texts[1] && texts[0].size() > 100;
  ok = ok && traj_same;
  detail += fmt::format("click record (1 vs 4 workers) {}", traj_same ? "identical" : "DIFFERS");
  return {ok, detail};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* title, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failures += !o.pass;
    fmt::print("{} criterion {}: {} -- {}\n", o.pass ? "PASS" : "FAIL", id, title, o.detail);
    std::fflush(stdout);
  };

  report(1, "driven empty cavity matches coherent-state oracle", empty_cavity_oracle);

  const auto fig1c = run_preset("fig1c", 1);
  report(2, "fig1c maxima of m_n at +-g/sqrt(n)", [&] { return fig1c_peaks(fig1c); });
  const auto fig2 = run_preset("fig2", workers());
  report(3, "fig2 M_n positive only near the n-photon resonances", [&] { return fig2_measure(fig2); });
  const auto fig3 = run_preset("fig3", workers());
  report(4, "fig3 g2 peaks at zero detuning while M2 peaks near +-g/sqrt(2)", [&] { return fig3_contrast(fig3); });

  report(5, "classical mixtures never violate the Cauchy-Schwarz bound", classicality_guard);
  report(6, "weak drive: m_n ~ n! P_n", weak_drive_relation);
  report(7, "(a) attenuation leaves R_{k,k-1} unchanged", efficiency_algebraic);

  // click statistics only; expectation tracking would cost ~20x per jump interval
  const auto clicks = fig2_ensemble(kInvSqrt2, 1e8, 2000, 2718281828, false);
  report(7, "(b) thinned click records give consistent R_21, F_2 scales as eta^2",
         [&] { return efficiency_empirical(clicks); });
  const auto resonant = fig2_ensemble(0.0, 1e6, 2000, 3141592653, true);
  const auto two_photon = fig2_ensemble(kInvSqrt2, 1e6, 2000, 1618033988, true);
  report(8, "trajectory time averages of a^dag a match the steady state",
         [&] { return unraveling(resonant, two_photon); });

  report(9, "byte-identical outputs across runs and worker counts", [&] { return determinism(fig1c, fig2, fig3); });

  fmt::print("{} failing criteria\n", failures);
  return failures;
}
