#include <benchmark/benchmark.h>

#include "photocorr/trajectories.hpp"

using namespace photocorr;

static void BM_Ensemble(benchmark::State& state) {
  const auto p = JCParams::from_ratios(1.0, 0.1, 0.1, 0.1, 0.7071);
  const bool track = state.range(0) != 0;
  std::uint64_t jumps = 0;
  for (auto _ : state) {
    const auto ens = mcwf_ensemble(p, SpaceConfig{6}, 1e6, 20, 1, EnsembleOptions{1, track});
    jumps += ens.jumps;
  }
  state.counters["jumps/s"] = benchmark::Counter(static_cast<double>(jumps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Ensemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_EstimateRatios(benchmark::State& state) {
  const auto p = JCParams::from_ratios(1.0, 0.1, 0.1, 1.0, 0.7071);
  const auto rec = mcwf_ensemble(p, SpaceConfig{8}, 2e4, 100, 3).record;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_ratios(rec, 0.5, 3, 200, 1));
}
BENCHMARK(BM_EstimateRatios)->Unit(benchmark::kMillisecond);
