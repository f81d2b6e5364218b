// Serial reference vs the OpenMP enumerative study on grid networks.

#include <benchmark/benchmark.h>

#include "leakloc/generators.hpp"
#include "leakloc/study.hpp"

using namespace leakloc;

namespace {

StudyOptions options(PartitionMethod method, int threads, bool cache) {
  StudyOptions o;
  o.config.method = method;
  o.threads = threads;
  o.cache_partitions = cache;
  return o;
}

void BM_StudySerial(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const Network grid = grid_graph(side, side);
  const StudyOptions o = options(PartitionMethod::Spectral, 1, state.range(1) != 0);
  for (auto _ : state) benchmark::DoNotOptimize(enumerative_study_serial(grid, o).summary.mean);
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * grid.n()));
}

void BM_StudyParallel(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const Network grid = grid_graph(side, side);
  const StudyOptions o = options(PartitionMethod::Spectral, static_cast<int>(state.range(2)), state.range(1) != 0);
  for (auto _ : state) benchmark::DoNotOptimize(enumerative_study(grid, o).summary.mean);
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * grid.n()));
}

void BM_StudyIlpParallel(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const Network grid = grid_graph(side, side);
  const StudyOptions o = options(PartitionMethod::IlpGoalProgramming, 0, true);
  for (auto _ : state) benchmark::DoNotOptimize(enumerative_study(grid, o).summary.mean);
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * grid.n()));
}

}  // namespace

// Args: grid side, partition cache on/off, threads (parallel only).
BENCHMARK(BM_StudySerial)->Args({8, 0})->Args({8, 1})->Args({12, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StudyParallel)
    ->Args({8, 0, 2})
    ->Args({8, 1, 2})
    ->Args({12, 1, 2})
    ->Args({12, 1, 4})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_StudyIlpParallel)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
