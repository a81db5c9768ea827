#include <benchmark/benchmark.h>

#include <random>

#include "lapse/cost.hpp"
#include "lapse/crop.hpp"
#include "lapse/sampling.hpp"
#include "lapse/synthetic.hpp"

namespace {

using namespace lapse;

MotionTrace random_trace(int n, int tau) {
  SyntheticOptions o;
  o.kind = SyntheticKind::kRandom;
  o.n = n;
  o.max_skip = tau;
  return make_synthetic_trace(o);
}

void BM_FirstOrder(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int tau = static_cast<int>(state.range(1));
  const MotionTrace t = random_trace(n, tau);
  GraphSpec spec;
  spec.n = n;
  spec.tau = tau;
  spec.weights = CostWeights::for_trace(t, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_first_order(t, spec));
  state.SetItemsProcessed(state.iterations() * n * tau);
}
BENCHMARK(BM_FirstOrder)->Args({2000, 100})->Args({8000, 100})->Args({24000, 100})
    ->Unit(benchmark::kMillisecond);

void BM_SecondOrder(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int tau = static_cast<int>(state.range(1));
  const MotionTrace t = random_trace(n, tau);
  GraphSpec spec;
  spec.n = n;
  spec.tau = tau;
  spec.d_start = spec.d_end = tau;
  spec.weights = CostWeights::for_trace(t, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_second_order(t, spec));
}
BENCHMARK(BM_SecondOrder)->Args({1000, 20})->Args({2000, 40})
    ->Unit(benchmark::kMillisecond);

void BM_AppearanceCost(benchmark::State& state) {
  const MotionTrace t = random_trace(4, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(appearance_cost(*t.histogram(0), *t.histogram(1)));
  }
}
BENCHMARK(BM_AppearanceCost);

void BM_CropSmoothing(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-100, 100);
  std::vector<Vec2> m(state.range(0));
  for (Vec2& v : m) v = Vec2(u(rng), u(rng));
  for (auto _ : state) benchmark::DoNotOptimize(smooth_crop_centers(m, 15.0));
}
BENCHMARK(BM_CropSmoothing)->Arg(100)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
