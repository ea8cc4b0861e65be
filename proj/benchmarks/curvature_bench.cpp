#include <benchmark/benchmark.h>

#include "rlab/frames.hpp"
#include "rlab/metrics.hpp"
#include "rlab/tensor.hpp"

namespace {

const rlab::ChartedMetric& metric(int which) {
  static const rlab::ChartedMetric zoo[] = {rlab::builtin("s4"), rlab::builtin("model_gf"), rlab::builtin("h2xh2")};
  return zoo[which];
}

rlab::SmallVec sample_point(const rlab::ChartedMetric& cm) {
  rlab::Rng rng(1);
  return cm.chart.sample(rng);
}

void BM_CurvatureAt(benchmark::State& state) {
  const auto& cm = metric(static_cast<int>(state.range(0)));
  const rlab::SmallVec p = sample_point(cm);
  for (auto _ : state) benchmark::DoNotOptimize(rlab::curvature_at(cm.metric, rlab::as_span(p)));
  state.SetLabel(cm.metric.name());
}
BENCHMARK(BM_CurvatureAt)->DenseRange(0, 2);

void BM_PfaffianDensity(benchmark::State& state) {
  const auto& cm = metric(static_cast<int>(state.range(0)));
  const rlab::SmallVec p = sample_point(cm);
  for (auto _ : state) benchmark::DoNotOptimize(rlab::pfaffian_density(cm.metric, rlab::as_span(p)));
  state.SetLabel(cm.metric.name());
}
BENCHMARK(BM_PfaffianDensity)->DenseRange(0, 2);

void BM_MinimizingFrame(benchmark::State& state) {
  const auto& cm = metric(static_cast<int>(state.range(0)));
  const rlab::CurvaturePoint cp = rlab::curvature_at(cm.metric, rlab::as_span(sample_point(cm)));
  for (auto _ : state) benchmark::DoNotOptimize(rlab::minimizing_frame(cp));
  state.SetLabel(cm.metric.name());
}
BENCHMARK(BM_MinimizingFrame)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

void BM_ClassifyPoint(benchmark::State& state) {
  const auto& cm = metric(1);
  const rlab::CurvaturePoint cp = rlab::curvature_at(cm.metric, rlab::as_span(sample_point(cm)));
  for (auto _ : state) benchmark::DoNotOptimize(rlab::classify_point(cp, std::nullopt, std::nullopt, false));
}
BENCHMARK(BM_ClassifyPoint);

}  // namespace
