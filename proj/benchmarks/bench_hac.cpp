#include "bench_common.hpp"
#include "fwpd/dissimilarity.hpp"
#include "fwpd/hac.hpp"

#include <benchmark/benchmark.h>

static void BM_HacBuild(benchmark::State& state) {
    auto ds = benchsupport::masked_dataset(static_cast<std::size_t>(state.range(0)), 16);
    auto ctx = fwpd::build_context(ds, 0.25);
    auto m = fwpd::pairwise_matrix(ctx, ds);
    for (auto _ : state) {
        auto dend = fwpd::hac(m, fwpd::Linkage::average);
        benchmark::DoNotOptimize(dend.merges.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HacBuild)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNCubed);
