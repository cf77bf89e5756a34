#include <benchmark/benchmark.h>

#include "photocorr/lindblad.hpp"

using namespace photocorr;

// One scan point: Liouvillian assembly plus the LU steady-state solve.
static void BM_SteadyState(benchmark::State& state) {
  const SpaceConfig s{static_cast<int>(state.range(0))};
  const auto p = JCParams::from_ratios(1.0, 0.1, 0.1, 0.1, 0.7071);
  for (auto _ : state) {
    const auto l = build_liouvillian(interaction_hamiltonian(p, s), p, s);
    benchmark::DoNotOptimize(steady_state(l).residual);
  }
  state.SetLabel("d^2=" + std::to_string(s.dim() * s.dim()));
}
BENCHMARK(BM_SteadyState)->Arg(6)->Arg(12)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_BuildLiouvillian(benchmark::State& state) {
  const SpaceConfig s{static_cast<int>(state.range(0))};
  const auto p = JCParams::from_ratios(1.0, 0.1, 0.1, 1.0, 0.0);
  const auto h = interaction_hamiltonian(p, s);
  for (auto _ : state) benchmark::DoNotOptimize(build_liouvillian(h, p, s).matrix.data());
}
BENCHMARK(BM_BuildLiouvillian)->Arg(12)->Arg(20)->Unit(benchmark::kMillisecond);
