#include <benchmark/benchmark.h>

#include "rlab/gbc.hpp"
#include "rlab/metrics.hpp"

namespace {

void BM_MidpointChiS4(benchmark::State& state) {
  const rlab::ChartedMetric cm = rlab::builtin("s4");
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rlab::midpoint_chi(cm.metric, cm.chart, n));
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_MidpointChiS4)->Arg(12)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_IntegrateChiS2xS2(benchmark::State& state) {
  const rlab::ChartedMetric cm = rlab::builtin("s2xs2");
  const rlab::QuadratureSpec spec{static_cast<int>(state.range(0)), true};
  for (auto _ : state) benchmark::DoNotOptimize(rlab::integrate_chi(cm.metric, cm.chart, spec));
}
BENCHMARK(BM_IntegrateChiS2xS2)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
