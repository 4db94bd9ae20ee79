#pragma once

// Report bundle produced by the pipeline, and its text / CSV / JSON renderings.

#include "regrid/dist_analysis.hpp"
#include "regrid/event_engine.hpp"
#include "regrid/history_rerun.hpp"
#include "regrid/outage_store.hpp"
#include "regrid/ug_stats.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace regrid {

struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string tool_version;
    std::optional<std::string> generated_at;
};

struct CircuitReport {
    std::string circuit_id;
    double years = 0.0;
    std::size_t n_outages = 0;
    std::size_t n_events = 0;
    AnnualMetrics base;
    double mean_customers = 0.0;
    double median_customers = 0.0;
    std::optional<ReliabilityIndices> reliability;
};

struct DensityReport {
    std::string name; // e.g. overhead_duration_minutes
    DensityCurve curve;
    std::optional<SampleStats> stats; // absent for log-domain curves
    std::optional<double> tail_400;   // P(duration <= 400 min)
};

struct ReportBundle {
    std::string mode;
    std::optional<DatasetSummary> dataset;
    std::optional<FilterBreakdown> filter;
    std::size_t parse_issues = 0;
    std::vector<CircuitReport> circuits;
    std::optional<PooledRate> pooled_rate;
    std::optional<UgStats> ug_stats; // lambda and duration; customers are per circuit
    std::vector<RerunResult> undergrounding;
    std::optional<RerunResult> restoration;
    std::vector<DensityReport> densities;
    std::vector<std::string> warnings;
    double ug_fraction = 0.8;
    double speedup = 0.1;
    Provenance provenance;
};

nlohmann::json to_json(const ReportBundle& bundle);

enum class OutputFormat { Text, Csv, Json };

struct RenderedArtifact {
    std::string filename;
    std::string content;
};

/// Text rounds to the displayed precision of the published tables; CSV and
/// JSON carry full precision.
std::vector<RenderedArtifact> render_tables(const ReportBundle& bundle, OutputFormat format);

std::string render_rerun_text(const RerunResult& result, const std::string& title);

} // namespace regrid
