#pragma once

// End-to-end orchestration: ingest -> filter -> underground statistics ->
// base metrics -> reruns -> report.

#include "regrid/history_rerun.hpp"
#include "regrid/report.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace regrid {

enum class AnalysisMode { Ingest, StatsUg, Metrics, RerunUg, RerunRestore, Density, All };

std::string_view to_string(AnalysisMode mode);
std::optional<AnalysisMode> parse_mode(std::string_view text);

struct YearsSetting {
    YearsPolicy policy = YearsPolicy::DatasetSpan;
    double fixed_years = 0.0;
};

struct PipelineConfig {
    std::filesystem::path outages_path;
    std::filesystem::path circuits_path; // circuit / exposure table, optional for some modes
    CsvSchema schema;
    std::vector<std::string> circuits;   // empty: every overhead-only circuit with outages
    ScheduledCodes scheduled = ScheduledCodes::defaults();
    Seconds gap_threshold = kDefaultGapThreshold;
    YearsSetting years;
    UndergroundingConfig undergrounding;
    RestorationConfig restoration;
    OutlierPolicy outlier;
    std::optional<double> lambda_ug_override;
    std::optional<double> ug_duration_override; // hours
    std::filesystem::path output_dir = "regrid-out";
    std::set<OutputFormat> formats{OutputFormat::Text, OutputFormat::Json};
    AnalysisMode mode = AnalysisMode::All;
    bool include_timestamp = true;

    void validate() const;
};

/// Overlays fields present in `j` onto `base`. Unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});

/// Fields that change results. Thread count, output location and formats
/// are excluded.
nlohmann::json semantic_config(const PipelineConfig& config);

/// 16 hex digits, FNV-1a over the canonical semantic config.
std::string config_hash(const PipelineConfig& config);

std::string tool_version();

/// Errors from any step are rethrown with the step name prefixed and the
/// original ErrorKind kept.
ReportBundle run_pipeline(const PipelineConfig& config);

/// Renders every requested format into config.output_dir; returns the paths.
std::vector<std::filesystem::path> write_report(const ReportBundle& bundle, const PipelineConfig& config);

} // namespace regrid
