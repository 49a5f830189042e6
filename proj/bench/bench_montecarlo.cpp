#include <benchmark/benchmark.h>

#include "tailidx/montecarlo.hpp"

namespace {

tailidx::ExperimentConfig bench_config(std::size_t reps) {
  tailidx::ExperimentConfig cfg;
  cfg.dist = {tailidx::Family::burr, 1.0, -1.0, 1.0};
  cfg.n = 1000;
  cfg.replications = reps;
  cfg.seed = 20240611;
  return cfg;
}

void BM_RunCellSerial(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto rep = tailidx::run_cell_serial(cfg, {1.0, -1.0});
    benchmark::DoNotOptimize(rep);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RunCellParallel(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto rep = tailidx::run_cell(cfg, {1.0, -1.0}, 0);
    benchmark::DoNotOptimize(rep);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_RunCellSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunCellParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
