#pragma once

// Resilience events: grouping outages that bunch together in time, and the
// per-event, annual and reliability metrics computed from them.

#include "regrid/outage_store.hpp"

#include <nlohmann/json_fwd.hpp>

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace regrid {

inline constexpr Seconds kDefaultGapThreshold = std::chrono::hours{1};

struct ResilienceEvent {
    std::vector<OutageRecord> outages; // sorted by start, never empty

    TimePoint start() const;   // earliest start
    TimePoint end() const;     // latest restore
};

/// Start-time bunching: after sorting by start, an outage joins the current
/// event iff its start is within `gap_threshold` of the previous outage's start.
std::vector<ResilienceEvent> group_events(std::span<const OutageRecord> records,
                                          Seconds gap_threshold = kDefaultGapThreshold);

/// Outage expressed in hours relative to an arbitrary origin. Used by the
/// restoration rerun, whose rescaled restore times are not whole seconds.
struct OutageSpan {
    double start_h = 0.0;
    double restore_h = 0.0;
    double customers = 0.0;

    double duration_h() const { return restore_h - start_h; }
};

std::vector<OutageSpan> to_spans(const ResilienceEvent& event);

struct EventMetrics {
    std::size_t n_outages = 0;
    double customers_affected = 0.0;
    double customer_hours = 0.0;
    double outage_hours = 0.0;
    double event_duration = 0.0;   // last restore - first start, hours
    double restore_duration = 0.0; // last restore - first restore, hours
};

EventMetrics event_metrics(const ResilienceEvent& event);
EventMetrics event_metrics(std::span<const OutageSpan> outages);

struct AnnualMetrics {
    double years = 0.0;
    double outages = 0.0;
    double customers = 0.0;
    double customer_hours = 0.0;
    double outage_hours = 0.0;
};

/// Sums the four additive metrics over events and divides by `years`.
/// Throws ConfigError if years is not positive.
AnnualMetrics annualize(std::span<const EventMetrics> metrics, double years);

struct ReliabilityIndices {
    double saifi = 0.0; // interruptions / customer / year
    double saidi = 0.0; // minutes / customer / year
    double caidi = 0.0; // minutes / interruption
    double asai = 1.0;
};

ReliabilityIndices reliability_indices(std::span<const OutageRecord> records, std::int64_t total_customers,
                                       double years);

enum class YearsPolicy { DatasetSpan, CircuitSpan, Fixed };

void write_events_csv(std::ostream& out, std::span<const ResilienceEvent> events);
nlohmann::json events_to_json(std::span<const ResilienceEvent> events);

void to_json(nlohmann::json& j, const EventMetrics& m);
void to_json(nlohmann::json& j, const AnnualMetrics& m);
void to_json(nlohmann::json& j, const ReliabilityIndices& r);

} // namespace regrid
