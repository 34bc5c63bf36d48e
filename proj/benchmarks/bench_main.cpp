#include <benchmark/benchmark.h>

#include "slabperc/cluster.hpp"
#include "slabperc/estimators.hpp"
#include "slabperc/lattice.hpp"
#include "slabperc/oracle.hpp"
#include "slabperc/pivotal.hpp"
#include "slabperc/sampler.hpp"

using namespace slabperc;

static void BM_SampleAndCluster(benchmark::State& state) {
    const LatticeBox box = build_box({static_cast<int>(state.range(1))}, CenteredBox{static_cast<int>(state.range(0))});
    BondConfig config(box.edge_count());
    ClusterForest forest;
    std::uint64_t r = 0;
    for (auto _ : state) {
        sample_into(config, box, {0.3, 0.3}, SeedSpec{1, r++});
        forest.build(box, config);
        benchmark::DoNotOptimize(forest.cluster_count());
    }
    state.SetItemsProcessed(state.iterations() * box.edge_count());
}
BENCHMARK(BM_SampleAndCluster)->Args({32, 1})->Args({64, 1})->Args({256, 2})->Unit(benchmark::kMillisecond);

static void BM_Sample(benchmark::State& state) {
    const LatticeBox box = build_box({1}, CenteredBox{static_cast<int>(state.range(0))});
    BondConfig config(box.edge_count());
    std::uint64_t r = 0;
    for (auto _ : state) {
        sample_into(config, box, {0.3, 0.3}, SeedSpec{1, r++});
        benchmark::DoNotOptimize(config.words().data());
    }
    state.SetItemsProcessed(state.iterations() * box.edge_count());
}
BENCHMARK(BM_Sample)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_OracleTable(benchmark::State& state) {
    const LatticeBox box = build_box({1}, RectBox{0, 2, 0, 1});
    for (auto _ : state) {
        const oracle::EventTable table(box, event::LeftRightCrossing{});
        benchmark::DoNotOptimize(table.polynomial().total());
    }
}
BENCHMARK(BM_OracleTable)->Unit(benchmark::kMillisecond);

static void BM_PivotalScan(benchmark::State& state) {
    const LatticeBox box = build_box({1}, CenteredBox{static_cast<int>(state.range(0))});
    const auto mode = state.range(1) ? pivotal::ScanMode::Full : pivotal::ScanMode::Pruned;
    pivotal::PivotalScanner scanner(box, event::OriginToBoundary{static_cast<int>(state.range(0))});
    BondConfig config(box.edge_count());
    std::vector<EdgeId> pivots;
    std::uint64_t r = 0;
    for (auto _ : state) {
        sample_into(config, box, {0.45, 0.3}, SeedSpec{2, r++});
        scanner.scan(config, pivots, mode);
        benchmark::DoNotOptimize(pivots.size());
    }
}
BENCHMARK(BM_PivotalScan)->Args({4, 0})->Args({4, 1})->Args({8, 0})->Unit(benchmark::kMicrosecond);

static void BM_EstimateTheta(benchmark::State& state) {
    const LatticeBox box = build_box({1}, CenteredBox{16});
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_event(box, {0.4, 0.3}, event::OriginToBoundary{16}, 1000, 3, 1).mean);
}
BENCHMARK(BM_EstimateTheta)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
