#include "regrid/ug_stats.hpp"

#include "regrid/csv.hpp"
#include "regrid/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace regrid {
namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Hyndman-Fan type 7 (linear interpolation between order statistics).
double quantile7(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(const std::string& text, std::size_t line, std::string_view column) {
    try {
        std::size_t used = 0;
        const std::string t(trim(text));
        const double v = std::stod(t, &used);
        if (used != t.size() || !std::isfinite(v)) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw DataError(fmt::format("circuit table line {}: invalid {} '{}'", line, column, text));
    }
}

} // namespace

double circuit_ug_rate(const CircuitUgExposure& exposure) {
    if (!exposure.has_exposure()) throw DataError(fmt::format("circuit {}: no exposure", exposure.circuit_id));
    return static_cast<double>(exposure.ug_outage_count) / exposure.mile_years();
}

double grubbs_critical_value(std::size_t n, double alpha) {
    if (n < 3) return std::numeric_limits<double>::infinity();
    const double nd = static_cast<double>(n);
    const boost::math::students_t dist(nd - 2.0);
    const double t = boost::math::quantile(boost::math::complement(dist, alpha / (2.0 * nd)));
    return (nd - 1.0) / std::sqrt(nd) * std::sqrt(t * t / (nd - 2.0 + t * t));
}

std::vector<std::size_t> flag_outliers(std::span<const double> values, const OutlierPolicy& policy) {
    std::vector<std::size_t> flagged;
    const std::size_t n = values.size();
    switch (policy.rule) {
    case OutlierRule::None:
        break;
    case OutlierRule::Grubbs: {
        if (n < 3) break;
        const double m = mean_of(values);
        double ss = 0.0;
        for (double v : values) ss += (v - m) * (v - m);
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (!(sd > 0.0)) break;
        std::size_t worst = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(values[i] - m) > std::abs(values[worst] - m)) worst = i;
        const double g = std::abs(values[worst] - m) / sd;
        if (g > grubbs_critical_value(n, policy.significance)) flagged.push_back(worst);
        break;
    }
    case OutlierRule::TukeyFence: {
        if (n < 4) break;
        std::vector<double> v(values.begin(), values.end());
        const double q1 = quantile7(v, 0.25);
        const double q3 = quantile7(v, 0.75);
        const double fence = q3 + policy.fence_multiplier * (q3 - q1);
        for (std::size_t i = 0; i < n; ++i)
            if (values[i] > fence) flagged.push_back(i);
        break;
    }
    }
    return flagged;
}

PooledRate pooled_ug_rate(std::span<const CircuitUgExposure> exposures, const OutlierPolicy& policy) {
    PooledRate pooled;
    std::vector<double> raw;
    for (const auto& e : exposures) {
        if (!e.has_exposure()) {
            ++pooled.excluded_no_exposure;
            continue;
        }
        const double r = circuit_ug_rate(e);
        pooled.circuits.push_back(CircuitRate{e.circuit_id, r, r, false});
        raw.push_back(r);
    }
    if (raw.empty()) throw DataError("no circuit has underground exposure");

    const auto flagged = flag_outliers(raw, policy);
    if (!flagged.empty() && flagged.size() < raw.size()) {
        double sum = 0.0;
        std::size_t kept = 0;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (std::find(flagged.begin(), flagged.end(), i) != flagged.end()) continue;
            sum += raw[i];
            ++kept;
        }
        const double replacement = sum / static_cast<double>(kept);
        for (std::size_t i : flagged) {
            pooled.circuits[i].outlier = true;
            pooled.circuits[i].rate = replacement;
        }
    }

    double total = 0.0;
    for (const auto& c : pooled.circuits) total += c.rate;
    pooled.lambda_ug = total / static_cast<double>(pooled.circuits.size());
    return pooled;
}

double ug_duration_mean(std::span<const double> durations_hours) {
    if (durations_hours.empty()) throw DataError("no underground outage durations");
    return mean_of(durations_hours);
}

double lower_median(std::span<const double> values) {
    if (values.empty()) throw DataError("median of empty sample");
    std::vector<double> v(values.begin(), values.end());
    const std::size_t k = (v.size() + 1) / 2 - 1;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

double typical_customers(std::span<const OutageRecord> records, CustomerStatistic statistic) {
    if (records.empty()) throw DataError("no outages to estimate customers per outage");
    std::vector<double> c;
    c.reserve(records.size());
    for (const auto& r : records) c.push_back(static_cast<double>(r.customers));
    return statistic == CustomerStatistic::Median ? lower_median(c) : mean_of(c);
}

void to_json(nlohmann::json& j, const UgStats& s) {
    j = nlohmann::json{{"lambda_ug", s.lambda_ug},
                       {"mean_duration_hours", s.mean_duration},
                       {"mean_customers", s.mean_customers},
                       {"median_customers", s.median_customers}};
}

void to_json(nlohmann::json& j, const PooledRate& p) {
    auto circuits = nlohmann::json::array();
    for (const auto& c : p.circuits) {
        circuits.push_back(
            {{"circuit", c.circuit_id}, {"raw_rate", c.raw_rate}, {"rate", c.rate}, {"outlier", c.outlier}});
    }
    j = nlohmann::json{
        {"lambda_ug", p.lambda_ug}, {"circuits", circuits}, {"excluded_no_exposure", p.excluded_no_exposure}};
}

CircuitTable parse_circuit_table(std::istream& in) {
    const auto rows = csv::read(in);
    if (rows.empty()) throw DataError("circuit table is empty");
    const auto& header = rows.front().fields;
    auto find = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (trim(header[i]) == name) return i;
        return std::nullopt;
    };
    auto require = [&](std::string_view name) {
        auto c = find(name);
        if (!c) throw DataError(fmt::format("circuit table: missing required column '{}'", name));
        return *c;
    };
    const auto c_id = require("circuit");
    const auto c_total = require("total_miles");
    const auto c_ug = require("underground_miles");
    const auto c_outages = require("ug_outages");
    const auto c_years = require("ug_years");
    const auto c_customers = find("customers_served");

    CircuitTable table;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() < header.size())
            throw DataError(fmt::format("circuit table line {}: expected {} fields", row.line, header.size()));
        CircuitInfo info;
        info.circuit_id = std::string(trim(row.fields[c_id]));
        info.total_miles = parse_number(row.fields[c_total], row.line, "total_miles");
        info.underground_miles = parse_number(row.fields[c_ug], row.line, "underground_miles");
        info.ug_exposure_years = parse_number(row.fields[c_years], row.line, "ug_years");
        if (c_customers && !trim(row.fields[*c_customers]).empty()) {
            info.customers_served =
                static_cast<std::int64_t>(parse_number(row.fields[*c_customers], row.line, "customers_served"));
        }
        info.validate();
        const double outages = parse_number(row.fields[c_outages], row.line, "ug_outages");
        if (outages < 0.0 || outages != std::floor(outages))
            throw DataError(fmt::format("circuit table line {}: ug_outages must be a non-negative integer", row.line));

        table.exposures.push_back(CircuitUgExposure{info.circuit_id, info.total_miles, info.underground_miles,
                                                    info.ug_exposure_years, static_cast<std::size_t>(outages)});
        table.circuits.push_back(std::move(info));
    }
    return table;
}

void write_circuit_table(std::ostream& out, const CircuitTable& table) {
    csv::write_row(out,
                   {"circuit", "total_miles", "underground_miles", "ug_outages", "ug_years", "customers_served",
                    "annual_rate"});
    for (std::size_t i = 0; i < table.circuits.size(); ++i) {
        const auto& c = table.circuits[i];
        const std::size_t outages = i < table.exposures.size() ? table.exposures[i].ug_outage_count : 0;
        const CircuitUgExposure e{c.circuit_id, c.total_miles, c.underground_miles, c.ug_exposure_years, outages};
        csv::write_row(out, {c.circuit_id, fmt::format("{}", c.total_miles), fmt::format("{}", c.underground_miles),
                             std::to_string(outages), fmt::format("{}", c.ug_exposure_years),
                             c.customers_served ? std::to_string(*c.customers_served) : std::string{},
                             e.has_exposure() ? fmt::format("{:.4f}", circuit_ug_rate(e)) : std::string{}});
    }
}

} // namespace regrid
