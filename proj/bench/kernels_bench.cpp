// Serial reference vs chunked parallel kernels on the default 5x64 network.
// Arguments: collocation points (and worker count for the parallel cases).

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mhdpinn/kernels.hpp"

using namespace mhdpinn;

namespace {

struct Setup {
  Network net{MlpConfig{}};
  Normalizer norm = Normalizer::identity();
  std::vector<Point> colloc;
  std::vector<LabeledSample> data;
  PhysParams phys{5.0 / 3.0, 1e-3, 1e-3};

  explicit Setup(std::size_t n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) colloc.push_back({u(rng), u(rng), u(rng)});
    for (std::size_t i = 0; i < 100; ++i) {
      LabeledSample s;
      s.point = {u(rng), u(rng), u(rng)};
      for (std::size_t f = 0; f < kNumFields; ++f) s.label[f] = u(rng);
      data.push_back(s);
    }
  }
  LossProblem problem() const { return {colloc, data, {}, phys, 1.0}; }
};

void BM_SerialLossGradient(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::loss_gradient(s.net, s.norm, s.problem()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ParallelLossGradient(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::loss_gradient(s.net, s.norm, s.problem(), workers));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SerialPredict(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::predict(s.net, s.norm, s.colloc));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ParallelPredict(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::predict(s.net, s.norm, s.colloc, workers));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_SerialLossGradient)->Arg(100)->Arg(1600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelLossGradient)->Args({100, 1})->Args({1600, 1})->Args({1600, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SerialPredict)->Arg(45056)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelPredict)->Args({45056, 1})->Args({45056, 4})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
