#include "dsm/equilibrium.hpp"
#include "dsm/montecarlo.hpp"
#include "dsm/scenario_io.hpp"

#include <benchmark/benchmark.h>

using namespace dsm;

namespace {

const Scenario& scenario2() {
    static const Scenario s = load_scenario(DSM_DATA_DIR "/scenario2.json");
    return s;
}

const Scenario& scenario3() {
    static const Scenario s = load_scenario(DSM_DATA_DIR "/scenario3.json");
    return s;
}

}  // namespace

static void BM_EnumerateSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_ne_serial(scenario2()));
}
BENCHMARK(BM_EnumerateSerial)->Unit(benchmark::kMillisecond);

static void BM_EnumerateParallel(benchmark::State& state) {
    EnumerationOptions opts;
    opts.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_ne(scenario2(), opts));
}
BENCHMARK(BM_EnumerateParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_StudySerial(benchmark::State& state) {
    StudyConfig cfg;
    cfg.runs = 10'000;
    cfg.master_seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run_study_serial(scenario2(), cfg));
}
BENCHMARK(BM_StudySerial)->Unit(benchmark::kMillisecond);

static void BM_StudyParallel(benchmark::State& state) {
    StudyConfig cfg;
    cfg.runs = 10'000;
    cfg.master_seed = 1;
    cfg.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_study(scenario2(), cfg));
}
BENCHMARK(BM_StudyParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_FlatStudyParallel(benchmark::State& state) {
    StudyConfig cfg;
    cfg.runs = 100;
    cfg.master_seed = 1;
    cfg.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_study(scenario3(), cfg));
}
BENCHMARK(BM_FlatStudyParallel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
