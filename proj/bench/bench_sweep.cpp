#include <benchmark/benchmark.h>

#include "gictk/sim.hpp"

using namespace gictk;

namespace {

sim::ScenarioConfig bench_config(sim::SweepKind kind, double step_s) {
  sim::ScenarioConfig cfg;
  cfg.kind = kind;
  cfg.theta_big = kNsPerSec;
  cfg.theta_grid = sim::make_grid(ns_from_seconds(-2.0), ns_from_seconds(2.0),
                                  ns_from_seconds(step_s));
  cfg.delta_grid = sim::make_grid(0, ns_from_seconds(2.0), ns_from_seconds(step_s));
  cfg.base_latency = ns_from_seconds(0.01);
  cfg.seed = 99;
  return cfg;
}

void receipt_serial(benchmark::State& state) {
  const auto cfg = bench_config(sim::SweepKind::ReceiptSafety, 0.02);
  for (auto _ : state) {
    auto result = sim::run_sweep(cfg, sim::ExecMode::Serial);
    benchmark::DoNotOptimize(result.outcomes.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(cfg.theta_grid.size() *
                                                    cfg.delta_grid.size()));
}

void receipt_parallel(benchmark::State& state) {
  const auto cfg = bench_config(sim::SweepKind::ReceiptSafety, 0.02);
  for (auto _ : state) {
    auto result = sim::run_sweep(cfg, sim::ExecMode::Parallel);
    benchmark::DoNotOptimize(result.outcomes.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(cfg.theta_grid.size() *
                                                    cfg.delta_grid.size()));
}

void post_sync_serial(benchmark::State& state) {
  const auto cfg = bench_config(sim::SweepKind::PostSync, 0.1);
  for (auto _ : state) {
    auto result = sim::run_sweep(cfg, sim::ExecMode::Serial);
    benchmark::DoNotOptimize(result.outcomes.data());
  }
}

void post_sync_parallel(benchmark::State& state) {
  const auto cfg = bench_config(sim::SweepKind::PostSync, 0.1);
  for (auto _ : state) {
    auto result = sim::run_sweep(cfg, sim::ExecMode::Parallel);
    benchmark::DoNotOptimize(result.outcomes.data());
  }
}

BENCHMARK(receipt_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(receipt_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(post_sync_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(post_sync_parallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
