// Serial reference kernels against their OpenMP versions on MNIST-sized
// shapes (K = 784, J = 128, L = 10).

#include "fedssca/federation.hpp"
#include "fedssca/kernels.hpp"

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

using namespace fedssca;

namespace {

const Dims kDims{784, 128, 10};

const Dataset& data() {
  static const Dataset d = [] {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> px(0.0, 1.0);
    std::uniform_int_distribution<int> lab(0, 9);
    Dataset out(kDims.inputs, kDims.classes);
    std::vector<double> x(kDims.inputs);
    for (int n = 0; n < 2000; ++n) {
      for (auto& v : x) v = px(rng);
      out.push_back(x, lab(rng));
    }
    return out;
  }();
  return d;
}

const ModelParams& params() {
  static const ModelParams p = initial_params(kDims, 1, 0.05);
  return p;
}

std::vector<std::size_t> first(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

void BM_batch_stats_serial(benchmark::State& state) {
  const auto batch = first(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::batch_stats(params(), data(), batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_batch_stats_parallel(benchmark::State& state) {
  kernels::set_num_threads(static_cast<int>(state.range(1)));
  const auto batch = first(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::batch_stats(params(), data(), batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_sample_losses_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::sample_losses(params(), data()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data().size()));
}

void BM_sample_losses_parallel(benchmark::State& state) {
  kernels::set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::sample_losses(params(), data()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data().size()));
}

}  // namespace

BENCHMARK(BM_batch_stats_serial)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_batch_stats_parallel)
    ->ArgsProduct({{10, 100, 1000}, {1, 2, 4}})
    ->Unit(benchmark::kMicrosecond)
    ->UseRealTime();
BENCHMARK(BM_sample_losses_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sample_losses_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
