#include "regrid/event_engine.hpp"

#include "regrid/csv.hpp"
#include "regrid/error.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace regrid {

TimePoint ResilienceEvent::start() const {
    return outages.front().start;
}

TimePoint ResilienceEvent::end() const {
    TimePoint last = outages.front().restore;
    for (const auto& o : outages) last = std::max(last, o.restore);
    return last;
}

std::vector<ResilienceEvent> group_events(std::span<const OutageRecord> records, Seconds gap_threshold) {
    std::vector<OutageRecord> sorted(records.begin(), records.end());
    // outage_id breaks ties so the partition does not depend on input order
    std::sort(sorted.begin(), sorted.end(), [](const OutageRecord& a, const OutageRecord& b) {
        if (a.start != b.start) return a.start < b.start;
        return a.outage_id < b.outage_id;
    });

    std::vector<ResilienceEvent> events;
    for (auto& rec : sorted) {
        if (events.empty() || rec.start - events.back().outages.back().start > gap_threshold)
            events.emplace_back();
        events.back().outages.push_back(std::move(rec));
    }
    return events;
}

std::vector<OutageSpan> to_spans(const ResilienceEvent& event) {
    std::vector<OutageSpan> spans;
    spans.reserve(event.outages.size());
    const TimePoint origin = event.start();
    for (const auto& o : event.outages) {
        spans.push_back(OutageSpan{to_hours(o.start - origin), to_hours(o.restore - origin),
                                   static_cast<double>(o.customers)});
    }
    return spans;
}

EventMetrics event_metrics(std::span<const OutageSpan> outages) {
    EventMetrics m;
    if (outages.empty()) return m;
    double first_start = std::numeric_limits<double>::infinity();
    double first_restore = std::numeric_limits<double>::infinity();
    double last_restore = -std::numeric_limits<double>::infinity();
    for (const auto& o : outages) {
        const double d = o.duration_h();
        ++m.n_outages;
        m.customers_affected += o.customers;
        m.customer_hours += o.customers * d;
        m.outage_hours += d;
        first_start = std::min(first_start, o.start_h);
        first_restore = std::min(first_restore, o.restore_h);
        last_restore = std::max(last_restore, o.restore_h);
    }
    m.event_duration = last_restore - first_start;
    m.restore_duration = last_restore - first_restore;
    return m;
}

EventMetrics event_metrics(const ResilienceEvent& event) {
    const auto spans = to_spans(event);
    return event_metrics(spans);
}

AnnualMetrics annualize(std::span<const EventMetrics> metrics, double years) {
    if (!(years > 0.0)) throw ConfigError(fmt::format("annualization years must be positive, got {}", years));
    AnnualMetrics a;
    a.years = years;
    for (const auto& m : metrics) {
        a.outages += static_cast<double>(m.n_outages);
        a.customers += m.customers_affected;
        a.customer_hours += m.customer_hours;
        a.outage_hours += m.outage_hours;
    }
    a.outages /= years;
    a.customers /= years;
    a.customer_hours /= years;
    a.outage_hours /= years;
    return a;
}

ReliabilityIndices reliability_indices(std::span<const OutageRecord> records, std::int64_t total_customers,
                                       double years) {
    if (total_customers <= 0) throw ConfigError("total_customers must be positive");
    if (!(years > 0.0)) throw ConfigError("years must be positive");
    double interruptions = 0.0;
    double customer_minutes = 0.0;
    for (const auto& r : records) {
        interruptions += static_cast<double>(r.customers);
        customer_minutes += static_cast<double>(r.customers) * r.duration_minutes();
    }
    const double denom = static_cast<double>(total_customers) * years;
    ReliabilityIndices idx;
    idx.saifi = interruptions / denom;
    idx.saidi = customer_minutes / denom;
    idx.caidi = idx.saifi > 0.0 ? idx.saidi / idx.saifi : 0.0;
    idx.asai = 1.0 - idx.saidi / kMinutesPerYear;
    return idx;
}

void write_events_csv(std::ostream& out, std::span<const ResilienceEvent> events) {
    csv::write_row(out, {"event", "event_start", "event_end", "n_outages", "customers_affected", "customer_hours",
                         "outage_hours", "event_duration", "restore_duration"});
    std::size_t index = 0;
    for (const auto& e : events) {
        const auto m = event_metrics(e);
        csv::write_row(out, {std::to_string(index++), format_iso8601(e.start()), format_iso8601(e.end()),
                             std::to_string(m.n_outages), fmt::format("{}", m.customers_affected),
                             fmt::format("{}", m.customer_hours), fmt::format("{}", m.outage_hours),
                             fmt::format("{}", m.event_duration), fmt::format("{}", m.restore_duration)});
    }
}

nlohmann::json events_to_json(std::span<const ResilienceEvent> events) {
    auto arr = nlohmann::json::array();
    for (const auto& e : events) {
        nlohmann::json j = event_metrics(e);
        j["event_start"] = format_iso8601(e.start());
        j["event_end"] = format_iso8601(e.end());
        arr.push_back(std::move(j));
    }
    return arr;
}

void to_json(nlohmann::json& j, const EventMetrics& m) {
    j = nlohmann::json{{"n_outages", m.n_outages},
                       {"customers_affected", m.customers_affected},
                       {"customer_hours", m.customer_hours},
                       {"outage_hours", m.outage_hours},
                       {"event_duration", m.event_duration},
                       {"restore_duration", m.restore_duration}};
}

void to_json(nlohmann::json& j, const AnnualMetrics& m) {
    j = nlohmann::json{{"years", m.years},
                       {"outages", m.outages},
                       {"customers", m.customers},
                       {"customer_hours", m.customer_hours},
                       {"outage_hours", m.outage_hours}};
}

void to_json(nlohmann::json& j, const ReliabilityIndices& r) {
    j = nlohmann::json{{"saifi", r.saifi}, {"saidi", r.saidi}, {"caidi", r.caidi}, {"asai", r.asai}};
}

} // namespace regrid
