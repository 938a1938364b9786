// Serial vs OpenMP kernels: DP value iteration and singular-curve sampling.
#include <benchmark/benchmark.h>

#include <string>

#include "cda/io.hpp"

namespace {

const cda::Scenario& scenario() {
    static const cda::Scenario sc = cda::io::load_scenario(std::string(CDA_DATA_DIR) + "/scenarios/fuel_calm.json");
    return sc;
}

const cda::verify::GridSpec kGrid{100, 50, 6};

void BM_DpSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(cda::verify::dp_solve_serial(scenario(), kGrid).cost);
}

void BM_DpParallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(cda::verify::dp_solve(scenario(), kGrid).cost);
}

void BM_CurveSerial(benchmark::State& state) {
    const auto& sc = scenario();
    for (auto _ : state) {
        benchmark::DoNotOptimize(cda::opt::singular_arc_curve_serial(sc.problem, sc.h_f, sc.h0, 50.0).samples.size());
    }
}

void BM_CurveParallel(benchmark::State& state) {
    const auto& sc = scenario();
    for (auto _ : state) {
        benchmark::DoNotOptimize(cda::opt::singular_arc_curve(sc.problem, sc.h_f, sc.h0, 50.0).samples.size());
    }
}

}  // namespace

BENCHMARK(BM_DpSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DpParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurveSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurveParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
