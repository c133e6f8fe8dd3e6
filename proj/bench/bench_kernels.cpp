// Serial references against their OpenMP kernels, and the two steppers.

#include <benchmark/benchmark.h>

#include <random>

#include "tmlab/batch.hpp"
#include "tmlab/enumerate.hpp"
#include "tmlab/format.hpp"
#include "tmlab/rice.hpp"

using namespace tmlab;

namespace {

const Machine& champion5() {
  static const Machine m = parse_machine("1RB1LC_1RC1RB_1RD0LE_1LA1LD_1RZ0LA");
  return m;
}

std::vector<BatchItem> random_batch(std::size_t n) {
  std::mt19937_64 rng(7);
  std::vector<BatchItem> items;
  for (std::size_t k = 0; k < n; ++k) {
    Machine m(4);
    for (StateIndex q = 0; q < 4; ++q) {
      for (Symbol s = 0; s < 2; ++s) {
        const auto r = rng();
        const StateIndex next = (r % 9 == 0) ? kHaltState : static_cast<StateIndex>(r % 4);
        m.set(q, s, Transition{static_cast<Symbol>((r >> 8) & 1), (r >> 9) & 1 ? Move::Right : Move::Left, next});
      }
    }
    items.push_back({std::move(m), {}});
  }
  return items;
}

void BM_Champion5Direct(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(run_direct(champion5(), {}));
  st.SetItemsProcessed(st.iterations() * 47'176'870);
}
BENCHMARK(BM_Champion5Direct)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_Champion5Accelerated(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(run_accelerated(champion5(), {}));
  st.SetItemsProcessed(st.iterations() * 47'176'870);
}
BENCHMARK(BM_Champion5Accelerated)->Unit(benchmark::kMillisecond);

void BM_BatchSerial(benchmark::State& st) {
  const auto items = random_batch(512);
  for (auto _ : st) benchmark::DoNotOptimize(run_batch_serial(items, RunLimits::steps(10'000), Engine::Direct));
}
BENCHMARK(BM_BatchSerial)->Unit(benchmark::kMillisecond);

void BM_BatchParallel(benchmark::State& st) {
  const auto items = random_batch(512);
  for (auto _ : st) benchmark::DoNotOptimize(run_batch(items, RunLimits::steps(10'000), Engine::Direct));
}
BENCHMARK(BM_BatchParallel)->Unit(benchmark::kMillisecond);

void BM_EnumerateSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_serial(static_cast<std::size_t>(st.range(0))));
}
BENCHMARK(BM_EnumerateSerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_EnumerateParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(enumerate(static_cast<std::size_t>(st.range(0))));
}
BENCHMARK(BM_EnumerateParallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_RiceEmptiness(benchmark::State& st) {
  RiceBudget b;
  b.jobs = static_cast<int>(st.range(0));
  b.max_steps = 10'000;
  const Machine m = parse_machine("1RA1RA");
  for (auto _ : st) benchmark::DoNotOptimize(semi_decide_emptiness(m, b));
}
BENCHMARK(BM_RiceEmptiness)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
