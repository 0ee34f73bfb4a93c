#include "common.hpp"

#include "meetmate/grid_eval.hpp"

#include <benchmark/benchmark.h>

using namespace meetmate;

static void BM_Parse(benchmark::State& state) {
  const auto& sources = bench::workload().sources;
  std::size_t bytes = 0;
  for (auto _ : state) {
    for (const auto& s : sources) {
      benchmark::DoNotOptimize(dsl::parse(s));
      bytes += s.size();
    }
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_Parse);

static void BM_Render(benchmark::State& state) {
  std::vector<dsl::Expr> exprs;
  for (const auto& s : bench::workload().sources) exprs.push_back(dsl::parse(s));
  for (auto _ : state) {
    for (const auto& e : exprs) benchmark::DoNotOptimize(dsl::render(e));
  }
}
BENCHMARK(BM_Render);

// Column evaluation of every corpus constraint against a fresh evaluator.
static void BM_GridEvaluator(benchmark::State& state) {
  const auto g = bench::grid(static_cast<std::size_t>(state.range(0)));
  std::vector<dsl::Expr> exprs;
  for (const auto& s : bench::workload().sources) exprs.push_back(dsl::parse(s));
  for (auto _ : state) {
    dsl::GridEvaluator ev(g, bench::workload().ctx);
    for (const auto& e : exprs) benchmark::DoNotOptimize(ev.evaluate(e));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(exprs.size()));
}
BENCHMARK(BM_GridEvaluator)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

// Per-slot scalar evaluation, the path GridEvaluator replaces.
static void BM_ScalarEvaluate(benchmark::State& state) {
  const auto g = bench::grid(static_cast<std::size_t>(state.range(0)));
  std::vector<dsl::Expr> exprs;
  for (const auto& s : bench::workload().sources) exprs.push_back(dsl::parse(s));
  auto ctx = bench::workload().ctx;
  for (auto _ : state) {
    for (const auto& e : exprs) {
      for (const auto& slot : g.slots()) {
        ctx.candidate = slot;
        benchmark::DoNotOptimize(dsl::evaluate(e, ctx));
      }
    }
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(exprs.size()));
}
BENCHMARK(BM_ScalarEvaluate)->Arg(1000)->Unit(benchmark::kMillisecond);
