// Serial references against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include "stit/mcharness.hpp"
#include "stit/parallel.hpp"
#include "stit/regen.hpp"

namespace {

using namespace stit;

void BM_InclusionExclusionSerial(benchmark::State& state) {
  const auto q = regen::q_vector({1.0, 2.0}, 22);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(regen::p_by_inclusion_exclusion_serial(q, n));
}

void BM_InclusionExclusionParallel(benchmark::State& state) {
  const auto q = regen::q_vector({1.0, 2.0}, 22);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(regen::p_by_inclusion_exclusion(q, n));
  state.counters["workers"] = resolve_workers(0);
}

mc::ExperimentSpec table_spec(std::int64_t rows) {
  mc::ExperimentSpec s;
  s.replications = rows;
  s.path_length = 6;
  s.seed = 1;
  return s;
}

void BM_IndicatorTableSerial(benchmark::State& state) {
  const auto spec = table_spec(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mc::simulate_indicator_table_serial(spec).k_bits.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_IndicatorTableParallel(benchmark::State& state) {
  const auto spec = table_spec(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mc::simulate_indicator_table(spec).k_bits.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["workers"] = resolve_workers(0);
}

}  // namespace

BENCHMARK(BM_InclusionExclusionSerial)->Arg(16)->Arg(20)->Arg(22)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InclusionExclusionParallel)->Arg(16)->Arg(20)->Arg(22)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IndicatorTableSerial)->Arg(10'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IndicatorTableParallel)->Arg(10'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
