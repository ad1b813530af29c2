#include <benchmark/benchmark.h>

#include <string>

#include "cbrisk/faults.h"
#include "cbrisk/kron.h"
#include "cbrisk/network.h"
#include "cbrisk/powerflow.h"
#include "cbrisk/sampling.h"
#include "cbrisk/scenario.h"
#include "cbrisk/simulation.h"
#include "cbrisk/ybus.h"

using namespace cbrisk;

namespace {

const PowerSystem& case14() {
    static const PowerSystem s = assemble_system(read_text_file(CBRISK_BENCH_DATA_DIR "/case14.cdf"),
                                                 read_text_file(CBRISK_BENCH_DATA_DIR "/dyn14.json"));
    return s;
}

void BM_PowerFlow(benchmark::State& state) {
    const PowerSystem& s = case14();
    for (auto _ : state) benchmark::DoNotOptimize(solve_power_flow(s));
}
BENCHMARK(BM_PowerFlow);

void BM_KronToMachines(benchmark::State& state) {
    const PowerSystem& s = case14();
    const ComplexMatrix y = build_ybus(s);
    std::vector<std::size_t> keep{0, 1, 2, 5, 7};
    for (auto _ : state) benchmark::DoNotOptimize(kron_reduce(y, keep));
}
BENCHMARK(BM_KronToMachines);

void BM_PhaseMatrices(benchmark::State& state) {
    const PowerSystem& s = case14();
    const OperatingPoint op = solve_power_flow(s);
    const FaultSpec f = FaultSpec::on_line("Line_0006_0013", 0.4, FaultType::LG);
    for (auto _ : state) benchmark::DoNotOptimize(build_phase_matrices(s, op, f));
}
BENCHMARK(BM_PhaseMatrices);

void BM_Scenario(benchmark::State& state) {
    const PowerSystem& s = case14();
    CampaignConfig c;
    const ScenarioEvaluator eval(s, c);
    std::size_t i = 0;
    for (auto _ : state) {
        const ScenarioSample smp = make_scenario(c, s.bus_count(), "Line_0006_0013", i++);
        benchmark::DoNotOptimize(eval(smp));
    }
}
BENCHMARK(BM_Scenario)->Unit(benchmark::kMillisecond);

void BM_MakeScenario(benchmark::State& state) {
    CampaignConfig c;
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(make_scenario(c, 14, "Line_0006_0013", i++));
}
BENCHMARK(BM_MakeScenario);

}  // namespace

BENCHMARK_MAIN();
