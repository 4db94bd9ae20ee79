#include "regrid/outage_store.hpp"

#include "regrid/csv.hpp"
#include "regrid/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

namespace regrid {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

struct TypeName {
    SystemType type;
    std::string_view label;
    std::string_view identifier;
};

constexpr std::array kTypeNames{
    TypeName{SystemType::DistributionOverhead, "Distribution - Overhead", "DistributionOverhead"},
    TypeName{SystemType::DistributionUnderground, "Distribution - Underground", "DistributionUnderground"},
    TypeName{SystemType::Substation, "Substation", "Substation"},
    TypeName{SystemType::TransmissionOverhead, "Transmission - Overhead", "TransmissionOverhead"},
    TypeName{SystemType::NotReported, "Not Reported", "NotReported"},
    TypeName{SystemType::NotAnOutage, "Not an Outage", "NotAnOutage"},
};

std::optional<std::int64_t> parse_count(std::string_view s) {
    s = trim(s);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        // tolerate "12.0" style exports
        double d = 0.0;
        auto [p2, e2] = std::from_chars(s.data(), s.data() + s.size(), d);
        if (e2 != std::errc{} || p2 != s.data() + s.size() || d != static_cast<double>(static_cast<std::int64_t>(d)))
            return std::nullopt;
        value = static_cast<std::int64_t>(d);
    }
    return value;
}

} // namespace

std::string_view to_label(SystemType type) {
    for (const auto& n : kTypeNames)
        if (n.type == type) return n.label;
    return "Not Reported";
}

std::optional<SystemType> parse_system_type(std::string_view text) {
    const std::string key = lower(trim(text));
    for (const auto& n : kTypeNames) {
        if (key == lower(n.label) || key == lower(n.identifier)) return n.type;
    }
    return std::nullopt;
}

bool is_distribution(SystemType type) {
    return type == SystemType::DistributionOverhead || type == SystemType::DistributionUnderground;
}

void CircuitInfo::validate() const {
    if (!(total_miles > 0.0))
        throw DataError(fmt::format("circuit {}: total_miles must be positive", circuit_id));
    if (underground_miles < 0.0 || underground_miles > total_miles)
        throw DataError(fmt::format("circuit {}: underground_miles must lie in [0, total_miles]", circuit_id));
    if (ug_exposure_years < 0.0)
        throw DataError(fmt::format("circuit {}: ug_exposure_years must be non-negative", circuit_id));
}

ParseResult parse_outages(std::istream& source, const CsvSchema& schema) {
    const auto rows = csv::read(source);
    if (rows.empty()) throw DataError("outage source is empty");

    const auto& header = rows.front().fields;
    auto column = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (trim(header[i]) == name) return i;
        throw DataError(fmt::format("missing required column '{}'", name));
    };
    const std::size_t c_id = column(schema.outage_id);
    const std::size_t c_circuit = column(schema.circuit);
    const std::size_t c_start = column(schema.start);
    const std::size_t c_restore = column(schema.restore);
    const std::size_t c_customers = column(schema.customers);
    const std::size_t c_type = column(schema.system_type);
    const std::size_t c_cause = column(schema.cause_code);
    const std::size_t needed = std::max({c_id, c_circuit, c_start, c_restore, c_customers, c_type, c_cause}) + 1;

    ParseResult result;
    std::unordered_set<std::string> seen_ids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        auto issue = [&](std::string reason, bool kept = false) {
            result.issues.push_back(ParseIssue{row.line, std::move(reason), kept});
        };
        if (row.fields.size() < needed) {
            issue(fmt::format("expected at least {} fields, found {}", needed, row.fields.size()));
            continue;
        }

        OutageRecord rec;
        rec.outage_id = std::string(trim(row.fields[c_id]));
        rec.circuit_id = std::string(trim(row.fields[c_circuit]));
        rec.cause_code = std::string(trim(row.fields[c_cause]));
        if (rec.outage_id.empty()) {
            issue("missing outage_id");
            continue;
        }
        if (!seen_ids.insert(rec.outage_id).second) {
            issue(fmt::format("duplicate outage_id '{}'", rec.outage_id));
            continue;
        }

        const auto start = parse_timestamp(row.fields[c_start], schema.timestamps);
        const auto restore = parse_timestamp(row.fields[c_restore], schema.timestamps);
        if (!start) {
            issue(fmt::format("invalid start timestamp '{}'", row.fields[c_start]));
            continue;
        }
        if (!restore) {
            issue(fmt::format("invalid restore timestamp '{}'", row.fields[c_restore]));
            continue;
        }
        if (*restore < *start) {
            issue("negative duration");
            continue;
        }
        rec.start = *start;
        rec.restore = *restore;

        const auto type = parse_system_type(row.fields[c_type]);
        if (!type) {
            issue(fmt::format("unknown system type '{}'", row.fields[c_type]));
            continue;
        }
        rec.system_type = *type;

        if (trim(row.fields[c_customers]).empty()) {
            rec.customers = 0;
            rec.customers_missing = true;
            issue("missing customers, assigned 0", true);
        } else {
            const auto customers = parse_count(row.fields[c_customers]);
            if (!customers || *customers < 0) {
                issue(fmt::format("invalid customers '{}'", row.fields[c_customers]));
                continue;
            }
            rec.customers = *customers;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

void write_outages(std::ostream& out, std::span<const OutageRecord> records, const CsvSchema& schema) {
    csv::write_row(out, {schema.outage_id, schema.circuit, schema.start, schema.restore, schema.customers,
                         schema.system_type, schema.cause_code});
    for (const auto& r : records) {
        csv::write_row(out, {r.outage_id, r.circuit_id, format_iso8601(r.start), format_iso8601(r.restore),
                             r.customers_missing ? std::string{} : std::to_string(r.customers),
                             std::string(to_label(r.system_type)), r.cause_code});
    }
}

void write_issues(std::ostream& out, std::span<const ParseIssue> issues) {
    csv::write_row(out, {"row", "reason"});
    for (const auto& i : issues) csv::write_row(out, {std::to_string(i.row), i.reason});
}

ScheduledCodes ScheduledCodes::defaults() {
    return ScheduledCodes{{"Sched Construction_Intent", "Sched Maintenance_Intent", "Sched Util Work_Intent",
                           "Govt Req/Pub_Safety_Intent"},
                          false};
}

bool ScheduledCodes::contains(std::string_view cause_code) const {
    const auto code = trim(cause_code);
    if (!case_insensitive) return codes.count(std::string(code)) > 0;
    const std::string key = lower(code);
    return std::any_of(codes.begin(), codes.end(), [&](const std::string& c) { return lower(trim(c)) == key; });
}

bool is_scheduled(const OutageRecord& record, const ScheduledCodes& codes) {
    return codes.contains(record.cause_code);
}

std::vector<OutageRecord> filter_unscheduled_distribution(std::span<const OutageRecord> records,
                                                          const ScheduledCodes& codes) {
    std::vector<OutageRecord> out;
    for (const auto& r : records) {
        if (is_distribution(r.system_type) && !is_scheduled(r, codes)) out.push_back(r);
    }
    return out;
}

FilterBreakdown filter_breakdown(std::span<const OutageRecord> records, const ScheduledCodes& codes) {
    FilterBreakdown b;
    for (const auto& r : records) {
        if (!is_distribution(r.system_type))
            ++b.excluded_system_type;
        else if (is_scheduled(r, codes))
            ++b.excluded_scheduled;
        else
            ++b.retained;
    }
    return b;
}

CircuitSelection select_circuit(std::span<const OutageRecord> records, std::string_view circuit_id) {
    CircuitSelection sel;
    for (const auto& r : records)
        if (r.circuit_id == circuit_id) sel.records.push_back(r);
    if (sel.records.empty()) sel.warning = fmt::format("no outages found for circuit '{}'", circuit_id);
    return sel;
}

std::vector<OutageRecord> select_system_type(std::span<const OutageRecord> records, SystemType type) {
    std::vector<OutageRecord> out;
    for (const auto& r : records)
        if (r.system_type == type) out.push_back(r);
    return out;
}

double span_years(std::span<const OutageRecord> records) {
    if (records.size() < 2) return 0.0;
    const auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                              [](const auto& a, const auto& b) { return a.start < b.start; });
    return to_years(hi->start - lo->start);
}

DatasetSummary summarize_dataset(std::span<const OutageRecord> records, const ScheduledCodes& codes) {
    DatasetSummary s;
    s.total = records.size();
    for (const auto& r : records) {
        ++s.counts[{r.system_type, is_scheduled(r, codes)}];
        if (!s.first_outage || r.start < *s.first_outage) s.first_outage = r.start;
        if (!s.last_outage || r.start > *s.last_outage) s.last_outage = r.start;
    }
    s.span_years = span_years(records);
    return s;
}

} // namespace regrid
