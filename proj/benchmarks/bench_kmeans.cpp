#include "bench_common.hpp"
#include "fwpd/kmeans.hpp"

#include <benchmark/benchmark.h>

static void BM_KMeansRun(benchmark::State& state) {
    auto ds = benchsupport::masked_dataset(static_cast<std::size_t>(state.range(0)), 16);
    auto ctx = fwpd::build_context(ds, 0.25);
    for (auto _ : state) {
        auto res = fwpd::kmeans_fwpd(ds, ctx, 4, 7, 50);
        benchmark::DoNotOptimize(res.objective);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KMeansRun)->RangeMultiplier(2)->Range(64, 512);

static void BM_KMeansIteration(benchmark::State& state) {
    auto ds = benchsupport::masked_dataset(static_cast<std::size_t>(state.range(0)), 16);
    auto ctx = fwpd::build_context(ds, 0.25);
    auto U = fwpd::init_random(ds.rows, 4, 7);
    auto Z = fwpd::update_centroids(ds, U, 4, nullptr);
    for (auto _ : state) {
        auto Znew = fwpd::update_centroids(ds, U, 4, &Z);
        auto Unew = fwpd::assign(ctx, ds, Znew);
        benchmark::DoNotOptimize(Unew.assignment.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KMeansIteration)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oN);
