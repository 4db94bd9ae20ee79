#pragma once

// Rerunning history: recompute a circuit's metrics as if it had been partly
// undergrounded, or as if restoration had been uniformly faster.

#include "regrid/event_engine.hpp"
#include "regrid/ug_stats.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace regrid {

enum class LengthFactorMode {
    AsPrinted,  // n_ug = lambda * (1 - f) * l
    Complement, // n_ug = lambda * f * l
};

struct UndergroundingConfig {
    double ug_fraction = 0.8;
    std::size_t trials = 2000;
    std::uint64_t seed = 20010106;
    LengthFactorMode length_mode = LengthFactorMode::Complement;
    CustomerStatistic customer_statistic = CustomerStatistic::Median;
    Seconds gap_threshold = kDefaultGapThreshold;
    unsigned threads = 0; // 0: hardware concurrency

    void validate() const;
};

enum class RestorationModel {
    OutageScaling,       // every duration shrinks by (1 - rho)
    RestorePhaseScaling, // restores after the first restore compress toward it
};

struct RestorationConfig {
    double speedup = 0.10;
    RestorationModel model = RestorationModel::RestorePhaseScaling;
    std::size_t min_event_size = 2;

    void validate() const;
};

enum class RerunKind { Undergrounding, FasterRestoration };

struct MetricRow {
    std::string key;   // outages, customers, customer_hours, outage_hours, restore_duration, event_duration
    std::string label; // table label
    double base = 0.0;
    double after = 0.0;
    std::optional<double> reduction_pct; // absent when base is 0
    double dispersion = 0.0;       // standard deviation across trials
    double retained_mean = 0.0;    // after minus the deterministic underground term
    double ug_contribution = 0.0;
};

struct RerunResult {
    RerunKind kind = RerunKind::Undergrounding;
    std::string scope;  // circuit id(s)
    std::vector<MetricRow> rows;
    std::size_t trials_used = 0;
    std::size_t events_used = 0; // restoration: events meeting min_event_size
    double years = 0.0;
    double n_ug = 0.0;
    double retained_fraction = 0.0; // k / N

    const MetricRow& row(std::string_view key) const;
};

std::optional<double> reduction_pct(double base, double after);

/// Expected underground outages per year on the converted length.
double expected_ug_outages(double lambda_ug, const UndergroundingConfig& config, const CircuitInfo& circuit);

/// k = floor(keep_fraction * n + 0.5)
std::size_t retained_count(std::size_t n, double keep_fraction);

/// Random stream for one trial, derived only from (seed, trial index).
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial_index);

/// Uniform subset of size retained_count(N, keep_fraction), drawn without
/// replacement, in the input order.
std::vector<OutageRecord> sample_retained_overhead(std::span<const OutageRecord> records, double keep_fraction,
                                                   std::mt19937_64& rng);

/// `records` are the circuit's unscheduled overhead outages; `years` comes
/// from the annualization policy.
RerunResult rerun_undergrounding(std::span<const OutageRecord> records, const CircuitInfo& circuit,
                                 const UgStats& ug_stats, double years, const UndergroundingConfig& config);

/// Rescaled copy of one event's outages (hours from event start).
std::vector<OutageSpan> restore_faster(std::span<const OutageSpan> outages, const RestorationConfig& config);

RerunResult rerun_faster_restoration(std::span<const ResilienceEvent> events, const RestorationConfig& config);

void to_json(nlohmann::json& j, const RerunResult& r);

} // namespace regrid
