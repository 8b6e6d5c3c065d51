#include <benchmark/benchmark.h>

#include "hqsim/course.hpp"
#include "hqsim/latency.hpp"
#include "hqsim/metrics.hpp"
#include "hqsim/pilot.hpp"
#include "hqsim/sim.hpp"

using namespace hqsim;

static void BM_SimTick(benchmark::State& state) {
    const SimConfig cfg;
    QuadState s = QuadState::at_rest(cfg);
    const ControlInput u{8.0, -3.0};
    for (auto _ : state) {
        s = sim_tick(s, u, cfg);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_SimTick);

static void BM_GenerateCourse(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(generate_course(seed++));
}
BENCHMARK(BM_GenerateCourse);

static void BM_MeasureRiseTime(benchmark::State& state) {
    const SimConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(measure_rise_time(6.5, cfg));
}
BENCHMARK(BM_MeasureRiseTime);

// Full metrics over one pilot flight (about 22k samples).
static void BM_MetricsReport(benchmark::State& state) {
    FlightSetup setup;
    setup.course = generate_course(3);
    setup.cfg = config_for_level(SimConfig{}, 3);
    const FlightOutcome out = fly_with_pilot(PilotParams{}, setup);
    for (auto _ : state) benchmark::DoNotOptimize(metrics_report(out.log, setup.course));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.log.samples.size()));
}
BENCHMARK(BM_MetricsReport)->Unit(benchmark::kMillisecond);

static void BM_PilotFlight(benchmark::State& state) {
    FlightSetup setup;
    setup.course = generate_course(4);
    setup.cfg = config_for_level(SimConfig{}, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fly_with_pilot(PilotParams{}, setup));
}
BENCHMARK(BM_PilotFlight)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
