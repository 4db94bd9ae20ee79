#pragma once

// Deterministic synthetic outage datasets with exact category counts and
// controlled duration / customer distributions.

#include "regrid/outage_store.hpp"
#include "regrid/ug_stats.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace regrid {

struct SynthCircuit {
    std::string circuit_id;
    double miles = 1.0;
    std::optional<std::size_t> outage_count; // unscheduled overhead outages
    std::optional<double> annual_rate;       // used when outage_count is absent
    double span_years = 1.0;
    double start_offset_years = 0.0;         // from SynthSpec::epoch
    std::size_t storm_clusters = 0;          // bursts of storm_size outages
    std::size_t storm_size = 4;
    double underground_miles = 0.0;
    double ug_years = 0.0;
    std::size_t ug_outages = 0;              // unscheduled underground outages
    std::optional<std::int64_t> customers_served;

    std::size_t resolved_outage_count() const;
};

/// Minutes, natural-log parameters.
struct LognormalModel {
    double log_mean = 4.634729; // ln(103)
    double log_sd = 0.92;
};

struct DiscreteModel {
    std::vector<std::int64_t> values;
    std::vector<double> weights;
};

/// Extra records beyond the circuits' unscheduled overhead outages.
struct CategoryCount {
    SystemType type = SystemType::DistributionOverhead;
    std::size_t total = 0;
    std::optional<std::size_t> scheduled; // defaults to round(scheduled_fraction * total)
    std::string circuit_id;               // empty: spread over the circuits
};

struct SynthSpec {
    std::uint64_t seed = 1;
    TimePoint epoch = std::chrono::sys_days{std::chrono::year{2001} / 1 / 6};
    double dataset_span_years = 21.42;
    std::vector<SynthCircuit> circuits;
    LognormalModel durations;
    LognormalModel ug_durations{4.95, 0.8};
    DiscreteModel customers;
    std::vector<CategoryCount> categories;
    double scheduled_fraction = 0.0;
    Seconds grouping_threshold = std::chrono::hours{1};
    Seconds storm_max_gap = std::chrono::minutes{45}; // must be below the threshold
    bool storm_priority_restoration = true;           // largest outages restored first

    void validate() const;
};

SynthSpec synth_spec_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const SynthSpec& spec);

/// Named presets: "utility" (the 804-record utility-shaped dataset),
/// "circuit1" (46 well-separated outages), "storms" (heavy-tail bursts).
SynthSpec synth_preset(std::string_view name, std::uint64_t seed = 1);

/// Customers model with mean ~23, median 3 and mode 1.
DiscreteModel default_customer_model();

struct SynthReport {
    std::size_t records = 0;
    std::size_t overhead_unscheduled = 0;
    double target_median_duration_min = 0.0;
    double median_duration_min = 0.0;
    double tail_fraction_400_min = 0.0;
    double target_median_customers = 0.0;
    double median_customers = 0.0;
    double mean_customers = 0.0;
    bool within_tolerance = false;
};

void to_json(nlohmann::json& j, const SynthReport& r);

struct SynthOutput {
    std::vector<OutageRecord> records; // sorted by start, ids assigned in that order
    CircuitTable circuits;
    SynthReport report;
};

/// Throws ConfigError for infeasible specs (e.g. more scheduled than total,
/// bursts that do not fit the span).
SynthOutput generate(const SynthSpec& spec);

/// Independent stream for (seed, label); adding a label never perturbs others.
std::mt19937_64 synth_stream(std::uint64_t seed, std::string_view label);

/// n stratified draws u_i in ((i + U)/n), shuffled.
std::vector<double> stratified_uniforms(std::size_t n, std::mt19937_64& rng);

} // namespace regrid
