// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "depwarp/simulator.hpp"
#include "depwarp/status.hpp"
#include "depwarp/warping.hpp"

using namespace depwarp;

namespace {

std::vector<double> random_series(std::size_t len, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 100.0);
    std::vector<double> out(len);
    for (double& v : out) v = dist(rng);
    return out;
}

SpanCorpus synthetic_corpus(std::size_t target_spans) {
    SimulationSpec spec;
    spec.services = {"front", "auth", "db", "cache"};
    spec.edges = {{"front", "auth", DependencyKind::kStrong},
                  {"auth", "db", DependencyKind::kStrong},
                  {"front", "cache", DependencyKind::kWeak}};
    for (const auto& s : spec.services) spec.base_latency_us[s] = 3'000;
    spec.duration_min = 60;
    // Four spans per request; pick the arrival rate to hit the target count.
    spec.request_rate_per_min =
        std::max(1.0, static_cast<double>(target_spans) / (4.0 * spec.duration_min));
    spec.seed = 7;
    return simulate(spec).corpus;
}

void BM_WarpBanded(benchmark::State& state) {
    auto n = static_cast<std::size_t>(state.range(0));
    auto caller = random_series(n, 1);
    auto callee = random_series(n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(dsw(caller, callee, 1, 1));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WarpBanded)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_WarpSaturated(benchmark::State& state) {
    auto n = static_cast<std::size_t>(state.range(0));
    auto caller = random_series(n, 1);
    auto callee = random_series(n, 2);
    auto band = static_cast<std::int64_t>(n);
    for (auto _ : state) benchmark::DoNotOptimize(dsw(caller, callee, band, band));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WarpSaturated)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_StatusBinning(benchmark::State& state) {
    SpanCorpus corpus = synthetic_corpus(static_cast<std::size_t>(state.range(0)));
    BinningConfig config = default_binning_config(corpus, 60'000'000, 1);
    for (auto _ : state) benchmark::DoNotOptimize(generate_status(corpus, config));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.spans.size()));
}
BENCHMARK(BM_StatusBinning)->RangeMultiplier(10)->Range(1'000, 100'000);

}  // namespace

BENCHMARK_MAIN();
