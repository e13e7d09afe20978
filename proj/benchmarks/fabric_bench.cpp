#include <benchmark/benchmark.h>

#include "fabtwin/path_analytics.hpp"
#include "fabtwin/perf_model.hpp"
#include "fabtwin/spec_io.hpp"
#include "fabtwin/topology.hpp"

namespace {

const fabtwin::MachineSpec& leonardo() {
    static const auto spec = fabtwin::load_spec(std::string(FABTWIN_DATA_DIR) + "/leonardo.json");
    return spec;
}

const fabtwin::FabricGraph& graph() {
    static const auto g = fabtwin::build_topology(leonardo());
    return g;
}

void BM_ParseSpec(benchmark::State& state) {
    const auto text = fabtwin::serialize_spec(leonardo());
    for (auto _ : state) benchmark::DoNotOptimize(fabtwin::parse_spec(text));
}
BENCHMARK(BM_ParseSpec)->Unit(benchmark::kMillisecond);

void BM_BuildTopology(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(fabtwin::build_topology(leonardo()));
}
BENCHMARK(BM_BuildTopology)->Unit(benchmark::kMillisecond);

void BM_Route(benchmark::State& state) {
    const auto& g = graph();
    std::uint32_t b = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fabtwin::route(g, 0, b));
        b = (b + 613) % static_cast<std::uint32_t>(g.compute_count());
        if (b == 0) b = 1;
    }
}
BENCHMARK(BM_Route)->Unit(benchmark::kMicrosecond);

void BM_WorstCaseLatency(benchmark::State& state) {
    const fabtwin::LatencyModel model;
    for (auto _ : state) benchmark::DoNotOptimize(fabtwin::worst_case_latency(graph(), model));
}
BENCHMARK(BM_WorstCaseLatency)->Unit(benchmark::kMillisecond);

void BM_HalfCellsBisection(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(fabtwin::bisection_bandwidth(graph(), fabtwin::half_cells_split(graph())));
    }
}
BENCHMARK(BM_HalfCellsBisection)->Unit(benchmark::kMillisecond);

void BM_MachinePeak(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(fabtwin::machine_peak(leonardo(), fabtwin::NumericFormat::FP64, true, false));
    }
}
BENCHMARK(BM_MachinePeak);

}  // namespace

BENCHMARK_MAIN();
