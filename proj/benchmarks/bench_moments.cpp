#include <benchmark/benchmark.h>

#include "photocorr/moments.hpp"

using namespace photocorr;

static void BM_CorrelationReport(benchmark::State& state) {
  const MomentVector m({1.0, 5e-5, 4.9e-7, 5.3e-10, 2.6e-13, 8.2e-17});
  const MeasureOrder orders[] = {{2, 4}, {3, 5}, {4, 5}};
  for (auto _ : state) benchmark::DoNotOptimize(correlation_report(m, orders));
}
BENCHMARK(BM_CorrelationReport);

static void BM_NormallyOrderedMoments(benchmark::State& state) {
  const SpaceConfig s{20};
  Operator rho = Operator::Zero(s.dim(), s.dim());
  for (int i = 0; i < s.dim(); ++i) rho(i, i) = 1.0 / s.dim();
  const DensityMatrix r(rho);
  for (auto _ : state) benchmark::DoNotOptimize(normally_ordered_moments(r, s, 5));
}
BENCHMARK(BM_NormallyOrderedMoments);
