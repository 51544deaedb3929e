#include <benchmark/benchmark.h>

#include <random>

#include "honeyboost/evt.hpp"
#include "honeyboost/features.hpp"
#include "honeyboost/ocsvm.hpp"
#include "honeyboost/synth.hpp"
#include "honeyboost/windowing.hpp"

using namespace honeyboost;

namespace {

std::vector<Point2> cloud(std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {z(rng), z(rng)};
  return pts;
}

void BM_Kde(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(loo_kde(kde(pts, 0.5), 0.5, pts.size()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Kde)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_Lookout(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lookout(pts));
}
BENCHMARK(BM_Lookout)->RangeMultiplier(4)->Range(64, 4096);

void BM_Ocsvm(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ocsvm_fit(pts));
}
BENCHMARK(BM_Ocsvm)->RangeMultiplier(4)->Range(64, 1024);

void BM_WindowSignatures(benchmark::State& state) {
  ScenarioSpec spec;
  spec.duration = kDefaultWindowSize;
  spec.n_benign = static_cast<std::size_t>(state.range(0));
  const auto sc = generate(spec);
  const Window w{0, sc.stream.t_min(), sc.stream.t_min() + kDefaultWindowSize};
  for (auto _ : state) benchmark::DoNotOptimize(window_signatures(sc.stream, w));
}
BENCHMARK(BM_WindowSignatures)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
