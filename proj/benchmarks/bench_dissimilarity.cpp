#include "bench_common.hpp"
#include "fwpd/dissimilarity.hpp"

#include <benchmark/benchmark.h>

static void BM_PairwiseMatrix(benchmark::State& state) {
    auto ds = benchsupport::masked_dataset(static_cast<std::size_t>(state.range(0)), 16);
    auto ctx = fwpd::build_context(ds, 0.25);
    for (auto _ : state) {
        auto m = fwpd::pairwise_matrix(ctx, ds);
        benchmark::DoNotOptimize(m.entries.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PairwiseMatrix)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

static void BM_BuildContext(benchmark::State& state) {
    auto ds = benchsupport::masked_dataset(static_cast<std::size_t>(state.range(0)), 16);
    for (auto _ : state) {
        auto ctx = fwpd::build_context(ds, 0.25);
        benchmark::DoNotOptimize(ctx.d_max);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildContext)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);
