#pragma once

// Outage record ingestion, validation and the scheduled / system-type filter.

#include "regrid/time.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace regrid {

enum class SystemType {
    DistributionOverhead,
    DistributionUnderground,
    Substation,
    TransmissionOverhead,
    NotReported,
    NotAnOutage,
};

/// Label used in utility exports, e.g. "Distribution - Overhead".
std::string_view to_label(SystemType type);

/// Accepts the export labels and the enum spellings, ignoring case and
/// surrounding whitespace.
std::optional<SystemType> parse_system_type(std::string_view text);

bool is_distribution(SystemType type);

struct OutageRecord {
    std::string outage_id;
    std::string circuit_id;
    TimePoint start{};
    TimePoint restore{};
    std::int64_t customers = 0;
    SystemType system_type = SystemType::DistributionOverhead;
    std::string cause_code;
    bool customers_missing = false;

    Seconds duration() const { return restore - start; }
    double duration_hours() const { return to_hours(duration()); }
    double duration_minutes() const { return to_minutes(duration()); }

    bool operator==(const OutageRecord&) const = default;
};

struct CircuitInfo {
    std::string circuit_id;
    double total_miles = 0.0;
    double underground_miles = 0.0;
    double ug_exposure_years = 0.0;
    std::optional<std::int64_t> customers_served;

    /// Throws DataError when miles are out of range.
    void validate() const;
};

struct ParseIssue {
    std::size_t row = 0; // physical line in the source, header is line 1
    std::string reason;
    bool kept = false;   // true when the row still produced a (flagged) record
};

struct CsvSchema {
    std::string outage_id = "outage_id";
    std::string circuit = "circuit";
    std::string start = "start_time";
    std::string restore = "restore_time";
    std::string customers = "customers";
    std::string system_type = "system_type";
    std::string cause_code = "cause_code";
    TimestampFormat timestamps = TimestampFormat::Iso8601;
};

struct ParseResult {
    std::vector<OutageRecord> records;
    std::vector<ParseIssue> issues;
};

/// Reads outage CSV. Malformed rows become issues; a missing required column
/// or an empty source throws DataError.
ParseResult parse_outages(std::istream& source, const CsvSchema& schema = {});

/// Writes records using the schema's column names and ISO 8601 timestamps.
void write_outages(std::ostream& out, std::span<const OutageRecord> records, const CsvSchema& schema = {});

void write_issues(std::ostream& out, std::span<const ParseIssue> issues);

struct ScheduledCodes {
    std::set<std::string> codes;
    bool case_insensitive = false;

    /// The four planned-work cause codes used by the reference utility.
    static ScheduledCodes defaults();

    bool contains(std::string_view cause_code) const;
};

bool is_scheduled(const OutageRecord& record, const ScheduledCodes& codes = ScheduledCodes::defaults());

std::vector<OutageRecord> filter_unscheduled_distribution(std::span<const OutageRecord> records,
                                                          const ScheduledCodes& codes = ScheduledCodes::defaults());

struct FilterBreakdown {
    std::size_t retained = 0;
    std::size_t excluded_system_type = 0;
    std::size_t excluded_scheduled = 0;
};

FilterBreakdown filter_breakdown(std::span<const OutageRecord> records,
                                 const ScheduledCodes& codes = ScheduledCodes::defaults());

struct CircuitSelection {
    std::vector<OutageRecord> records;
    std::optional<std::string> warning;
};

CircuitSelection select_circuit(std::span<const OutageRecord> records, std::string_view circuit_id);

/// Records of one system type, order preserved.
std::vector<OutageRecord> select_system_type(std::span<const OutageRecord> records, SystemType type);

struct DatasetSummary {
    // (system type, scheduled) -> count
    std::map<std::pair<SystemType, bool>, std::size_t> counts;
    std::size_t total = 0;
    std::optional<TimePoint> first_outage;
    std::optional<TimePoint> last_outage;
    double span_years = 0.0;
};

DatasetSummary summarize_dataset(std::span<const OutageRecord> records,
                                 const ScheduledCodes& codes = ScheduledCodes::defaults());

/// First-to-last start time of the records in 365.25-day years; 0 if fewer than two.
double span_years(std::span<const OutageRecord> records);

} // namespace regrid
