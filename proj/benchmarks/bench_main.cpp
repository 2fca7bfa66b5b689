#include <benchmark/benchmark.h>

#include "batchalloc/regularizers.hpp"

static void BM_RegularizerEval(benchmark::State& state) {
  batchalloc::RegularizerSchedule s{static_cast<int>(state.range(0))};
  double x = 0.0;
  for (auto _ : state) {
    x += 1e-9;
    if (x > 1.0) x = 0.0;
    benchmark::DoNotOptimize(batchalloc::f(s, 1, x));
  }
}
BENCHMARK(BM_RegularizerEval)->Arg(2)->Arg(5)->Arg(10);

BENCHMARK_MAIN();
