#include "common.hpp"

#include <benchmark/benchmark.h>

using namespace meetmate;

static void BM_BestTime(benchmark::State& state) {
  const auto g = bench::grid(static_cast<std::size_t>(state.range(0)));
  const auto cs = bench::constraints(static_cast<std::size_t>(state.range(1)));
  const auto& ctx = bench::workload().ctx;
  for (auto _ : state) benchmark::DoNotOptimize(solver::best_time(g, cs, ctx));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_BestTime)
    ->Args({1000, 10})
    ->Args({10000, 100})
    ->Args({100000, 1000})
    ->Args({100000, 10000})
    ->Unit(benchmark::kMillisecond);

static void BM_DiverseTopK(benchmark::State& state) {
  const auto g = bench::grid(static_cast<std::size_t>(state.range(0)));
  const auto cs = solver::assign_weights(bench::constraints(8));
  const auto& ctx = bench::workload().ctx;
  for (auto _ : state) benchmark::DoNotOptimize(solver::diverse_topk(g, cs, ctx, 5));
}
BENCHMARK(BM_DiverseTopK)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_InitialSuggestion(benchmark::State& state) {
  const auto g = bench::grid(static_cast<std::size_t>(state.range(0)));
  const auto& ctx = bench::workload().ctx;
  for (auto _ : state) benchmark::DoNotOptimize(solver::initial_suggestion(g, ctx.attendees, ctx, 3));
}
BENCHMARK(BM_InitialSuggestion)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);
