// Serial reference vs OpenMP sweep on the default lambda grid.

#include <benchmark/benchmark.h>

#include "dbb/simulator.hpp"

namespace {

dbb::SweepSpec bench_spec(std::size_t replications) {
  dbb::SweepSpec s;
  s.trajectory = dbb::DriftModel::default_logistic();
  s.lambdas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  s.group_sizes = {8};
  s.replications = replications;
  s.base_seed = 1;
  return s;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto spec = bench_spec(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dbb::run_sweep_serial(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepOpenMP(benchmark::State& state) {
  const auto spec = bench_spec(static_cast<std::size_t>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(dbb::run_sweep(spec, workers));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_SweepSerial)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepOpenMP)
    ->ArgNames({"reps", "workers"})
    ->Args({20000, 1})
    ->Args({20000, 4})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
