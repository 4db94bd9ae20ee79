#include "regrid/dist_analysis.hpp"
#include "regrid/event_engine.hpp"
#include "regrid/history_rerun.hpp"
#include "regrid/synth_gen.hpp"

#include <benchmark/benchmark.h>

using namespace regrid;

namespace {

const SynthOutput& utility_data() {
    static const SynthOutput data = generate(synth_preset("utility"));
    return data;
}

std::vector<OutageRecord> circuit_records(const std::string& id) {
    const auto oh = select_system_type(filter_unscheduled_distribution(utility_data().records),
                                       SystemType::DistributionOverhead);
    return select_circuit(oh, id).records;
}

} // namespace

static void BM_GroupEvents(benchmark::State& state) {
    const auto records = filter_unscheduled_distribution(utility_data().records);
    for (auto _ : state) benchmark::DoNotOptimize(group_events(records));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(records.size()));
}
BENCHMARK(BM_GroupEvents);

static void BM_RerunUndergrounding(benchmark::State& state) {
    const auto records = circuit_records("CIRCUIT1");
    const CircuitInfo info{"CIRCUIT1", 10.15, 0.0, 0.0, std::nullopt};
    UgStats ug;
    ug.lambda_ug = 0.12;
    ug.mean_duration = 2.35;
    ug.median_customers = 2;
    UndergroundingConfig cfg;
    cfg.trials = 2000;
    cfg.threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(rerun_undergrounding(records, info, ug, 20.0, cfg));
    state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(BM_RerunUndergrounding)->Arg(1)->Arg(4)->UseRealTime();

static void BM_FasterRestoration(benchmark::State& state) {
    const auto events = group_events(generate(synth_preset("storms", 7)).records);
    const RestorationConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(rerun_faster_restoration(events, cfg));
}
BENCHMARK(BM_FasterRestoration);

static void BM_Kde(benchmark::State& state) {
    std::vector<double> minutes;
    for (const auto& r : filter_unscheduled_distribution(utility_data().records))
        if (r.system_type == SystemType::DistributionOverhead) minutes.push_back(r.duration_minutes());
    for (auto _ : state) benchmark::DoNotOptimize(kde(minutes));
}
BENCHMARK(BM_Kde);
BENCHMARK_MAIN();
