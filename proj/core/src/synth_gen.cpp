#include "regrid/synth_gen.hpp"

#include "regrid/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace regrid {
namespace {

using namespace std::chrono_literals;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::array kUnscheduledCauses{"Weather_Wind", "Vegetation_Tree Contact", "Animal_Squirrel",
                                        "Equipment_Failure", "Weather_Lightning", "Unknown_Cause"};

double uniform01(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double lognormal_quantile(const LognormalModel& m, double u) {
    static const boost::math::normal standard;
    u = std::clamp(u, 1e-12, 1.0 - 1e-12);
    return std::exp(m.log_mean + m.log_sd * boost::math::quantile(standard, u));
}

std::int64_t discrete_quantile(const DiscreteModel& m, double u) {
    double cumulative = 0.0;
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        cumulative += m.weights[i];
        if (u < cumulative) return m.values[i];
    }
    return m.values.back();
}

Seconds whole_minutes(double minutes) {
    return std::chrono::minutes{std::max<std::int64_t>(1, std::llround(minutes))};
}

TimePoint offset(TimePoint epoch, double years) {
    return epoch + Seconds{std::llround(years * kSecondsPerYear)};
}

// Arrival slot: a single outage or the first outage of a burst.
struct Slot {
    TimePoint time;
    bool burst = false;
};

struct Pending {
    OutageRecord record;
    Seconds duration{};
    int burst = -1; // burst index within the dataset, -1 for singles
};

} // namespace

std::size_t SynthCircuit::resolved_outage_count() const {
    if (outage_count) return *outage_count;
    if (annual_rate) return static_cast<std::size_t>(std::llround(*annual_rate * span_years));
    return 0;
}

void SynthSpec::validate() const {
    if (customers.values.empty() || customers.values.size() != customers.weights.size())
        throw ConfigError("customers model needs matching values and weights");
    const double wsum = std::accumulate(customers.weights.begin(), customers.weights.end(), 0.0);
    if (std::abs(wsum - 1.0) > 1e-9) throw ConfigError(fmt::format("customer weights sum to {}, not 1", wsum));
    for (std::size_t i = 0; i < customers.values.size(); ++i) {
        if (customers.weights[i] < 0.0 || customers.values[i] < 0)
            throw ConfigError("customer values and weights must be non-negative");
    }
    if (!(scheduled_fraction >= 0.0 && scheduled_fraction <= 1.0))
        throw ConfigError(fmt::format("scheduled fraction must lie in [0, 1], got {}", scheduled_fraction));
    if (storm_max_gap >= grouping_threshold) throw ConfigError("storm gap must be below the grouping threshold");
    if (durations.log_sd < 0.0 || ug_durations.log_sd < 0.0) throw ConfigError("log_sd must be non-negative");
    if (!(dataset_span_years > 0.0)) throw ConfigError("dataset span must be positive");
    for (const auto& c : circuits) {
        if (c.circuit_id.empty()) throw ConfigError("circuit id must not be empty");
        if (!(c.miles > 0.0)) throw ConfigError(fmt::format("circuit {}: miles must be positive", c.circuit_id));
        if (!(c.span_years > 0.0)) throw ConfigError(fmt::format("circuit {}: span must be positive", c.circuit_id));
        if (c.underground_miles < 0.0 || c.underground_miles > c.miles)
            throw ConfigError(fmt::format("circuit {}: underground miles out of range", c.circuit_id));
        if (c.storm_clusters > 0 && c.storm_size < 2)
            throw ConfigError(fmt::format("circuit {}: storm size must be at least 2", c.circuit_id));
        if (c.storm_clusters * c.storm_size > c.resolved_outage_count())
            throw ConfigError(fmt::format("circuit {}: storm outages exceed the outage count", c.circuit_id));
        if (c.ug_outages > 0 && !(c.ug_years > 0.0 && c.underground_miles > 0.0))
            throw ConfigError(fmt::format("circuit {}: underground outages need underground exposure", c.circuit_id));
    }
    for (const auto& cat : categories) {
        if (cat.scheduled && *cat.scheduled > cat.total)
            throw ConfigError(fmt::format("category {}: scheduled count {} exceeds total {}", to_label(cat.type),
                                          *cat.scheduled, cat.total));
        if (!cat.circuit_id.empty() || !circuits.empty()) continue;
        throw ConfigError("categories need a circuit id when no circuits are declared");
    }
}

std::mt19937_64 synth_stream(std::uint64_t seed, std::string_view label) {
    const std::uint64_t a = splitmix64(seed);
    const std::uint64_t b = splitmix64(a ^ fnv1a(label));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

std::vector<double> stratified_uniforms(std::size_t n, std::mt19937_64& rng) {
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = (static_cast<double>(i) + uniform01(rng)) / static_cast<double>(n);
    std::shuffle(u.begin(), u.end(), rng);
    return u;
}

DiscreteModel default_customer_model() {
    return DiscreteModel{{1, 2, 3, 4, 6, 10, 25, 60, 150, 400, 1000},
                         {0.367, 0.12, 0.10, 0.08, 0.08, 0.08, 0.07, 0.055, 0.03, 0.0125, 0.0055}};
}

SynthOutput generate(const SynthSpec& spec) {
    spec.validate();

    // Arrival times for each circuit's unscheduled overhead outages. Slots are
    // hard-core spaced so that distinct slots never share an event.
    std::vector<Pending> overhead;
    int burst_counter = 0;
    for (const auto& c : spec.circuits) {
        auto rng = synth_stream(spec.seed, "arrivals/" + c.circuit_id);
        const std::size_t n = c.resolved_outage_count();
        const std::size_t burst_outages = c.storm_clusters * c.storm_size;
        const std::size_t slots = n - burst_outages + c.storm_clusters;
        if (slots == 0) continue;

        const Seconds burst_extent = spec.storm_max_gap * static_cast<std::int64_t>(c.storm_size - 1);
        const Seconds separation = spec.grouping_threshold + burst_extent + 1min;
        const double span_s = c.span_years * kSecondsPerYear;
        const double free_s = span_s - static_cast<double>(separation.count()) * static_cast<double>(slots - 1);
        if (free_s <= 0.0)
            throw ConfigError(fmt::format("circuit {}: {} arrival slots do not fit in {} years", c.circuit_id, slots,
                                          c.span_years));

        std::vector<double> u(slots);
        for (auto& x : u) x = uniform01(rng) * free_s;
        std::sort(u.begin(), u.end());
        std::vector<bool> is_burst(slots, false);
        std::fill(is_burst.begin(), is_burst.begin() + static_cast<std::ptrdiff_t>(c.storm_clusters), true);
        std::shuffle(is_burst.begin(), is_burst.end(), rng);

        const TimePoint origin = offset(spec.epoch, c.start_offset_years);
        for (std::size_t s = 0; s < slots; ++s) {
            const double at = u[s] + static_cast<double>(separation.count()) * static_cast<double>(s);
            const TimePoint t0 = origin + std::chrono::duration_cast<Seconds>(std::chrono::minutes{std::llround(at / 60.0)});
            const std::size_t members = is_burst[s] ? c.storm_size : 1;
            const int burst = is_burst[s] ? burst_counter++ : -1;
            TimePoint t = t0;
            for (std::size_t k = 0; k < members; ++k) {
                if (k > 0) {
                    const auto gap_min = std::uniform_int_distribution<std::int64_t>(
                        1, std::chrono::duration_cast<std::chrono::minutes>(spec.storm_max_gap).count())(rng);
                    t += std::chrono::minutes{gap_min};
                }
                Pending p;
                p.record.circuit_id = c.circuit_id;
                p.record.start = t;
                p.record.system_type = SystemType::DistributionOverhead;
                p.record.cause_code = is_burst[s] ? "Weather_Wind" : kUnscheduledCauses[static_cast<std::size_t>(
                                                                        std::uniform_int_distribution<int>(0, 5)(rng))];
                p.burst = burst;
                overhead.push_back(std::move(p));
            }
        }
    }

    // Stratified durations and customers over the whole overhead population.
    {
        auto drng = synth_stream(spec.seed, "durations");
        auto crng = synth_stream(spec.seed, "customers");
        const auto du = stratified_uniforms(overhead.size(), drng);
        const auto cu = stratified_uniforms(overhead.size(), crng);
        std::vector<Seconds> durations(overhead.size());
        for (std::size_t i = 0; i < overhead.size(); ++i) durations[i] = whole_minutes(lognormal_quantile(spec.durations, du[i]));

        // storm outages take durations from the upper half of the pool
        std::sort(durations.begin(), durations.end());
        std::vector<std::size_t> storm_idx, single_idx;
        for (std::size_t i = 0; i < overhead.size(); ++i) (overhead[i].burst >= 0 ? storm_idx : single_idx).push_back(i);
        const std::size_t half = durations.size() / 2;
        std::vector<std::size_t> pool(durations.size());
        std::iota(pool.begin(), pool.end(), 0);
        std::vector<std::size_t> upper(pool.begin() + static_cast<std::ptrdiff_t>(half), pool.end());
        std::shuffle(upper.begin(), upper.end(), drng);
        std::vector<bool> taken(durations.size(), false);
        for (std::size_t k = 0; k < storm_idx.size(); ++k) {
            const std::size_t src = k < upper.size() ? upper[k] : pool[k];
            overhead[storm_idx[k]].duration = durations[src];
            taken[src] = true;
        }
        std::vector<Seconds> rest;
        for (std::size_t i = 0; i < durations.size(); ++i)
            if (!taken[i]) rest.push_back(durations[i]);
        std::shuffle(rest.begin(), rest.end(), drng);
        for (std::size_t k = 0; k < single_idx.size(); ++k) overhead[single_idx[k]].duration = rest[k];

        for (std::size_t i = 0; i < overhead.size(); ++i)
            overhead[i].record.customers = discrete_quantile(spec.customers, cu[i]);

        if (spec.storm_priority_restoration) {
            // within a burst the largest customer counts get the shortest outages
            std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(burst_counter));
            for (std::size_t i = 0; i < overhead.size(); ++i)
                if (overhead[i].burst >= 0) members[static_cast<std::size_t>(overhead[i].burst)].push_back(i);
            for (auto& m : members) {
                std::vector<Seconds> d;
                for (auto i : m) d.push_back(overhead[i].duration);
                std::sort(d.begin(), d.end());
                auto by_customers = m;
                std::stable_sort(by_customers.begin(), by_customers.end(), [&](auto a, auto b) {
                    return overhead[a].record.customers > overhead[b].record.customers;
                });
                for (std::size_t k = 0; k < by_customers.size(); ++k) overhead[by_customers[k]].duration = d[k];
            }
        }
        for (auto& p : overhead) p.record.restore = p.record.start + p.duration;
    }

    std::vector<OutageRecord> records;
    records.reserve(overhead.size());
    for (auto& p : overhead) records.push_back(std::move(p.record));
    const std::size_t overhead_count = records.size();

    // Unscheduled underground outages inside each circuit's underground exposure window.
    for (const auto& c : spec.circuits) {
        if (c.ug_outages == 0) continue;
        auto rng = synth_stream(spec.seed, "underground/" + c.circuit_id);
        const double window_end = spec.dataset_span_years;
        const double window_start = std::max(0.0, window_end - c.ug_years);
        for (std::size_t k = 0; k < c.ug_outages; ++k) {
            OutageRecord r;
            r.circuit_id = c.circuit_id;
            r.system_type = SystemType::DistributionUnderground;
            r.cause_code = "Equipment_Cable Failure";
            r.start = offset(spec.epoch, window_start + uniform01(rng) * (window_end - window_start));
            r.start = std::chrono::floor<std::chrono::minutes>(r.start);
            r.restore = r.start + whole_minutes(lognormal_quantile(spec.ug_durations, uniform01(rng)));
            r.customers = discrete_quantile(spec.customers, uniform01(rng));
            records.push_back(std::move(r));
        }
    }

    // Remaining categories: other system types and scheduled work.
    const auto scheduled_codes = ScheduledCodes::defaults();
    const std::vector<std::string> codes(scheduled_codes.codes.begin(), scheduled_codes.codes.end());
    std::size_t round_robin = 0;
    for (std::size_t ci = 0; ci < spec.categories.size(); ++ci) {
        const auto& cat = spec.categories[ci];
        auto rng = synth_stream(spec.seed, fmt::format("category/{}", ci));
        const std::size_t scheduled =
            cat.scheduled ? *cat.scheduled
                          : static_cast<std::size_t>(std::llround(spec.scheduled_fraction * static_cast<double>(cat.total)));
        for (std::size_t k = 0; k < cat.total; ++k) {
            OutageRecord r;
            r.circuit_id = !cat.circuit_id.empty() ? cat.circuit_id
                                                   : spec.circuits[round_robin++ % spec.circuits.size()].circuit_id;
            r.system_type = cat.type;
            r.cause_code = k < scheduled ? codes[k % codes.size()]
                                         : std::string(kUnscheduledCauses[k % kUnscheduledCauses.size()]);
            r.start = std::chrono::floor<std::chrono::minutes>(
                offset(spec.epoch, uniform01(rng) * spec.dataset_span_years));
            const LognormalModel& model =
                cat.type == SystemType::DistributionUnderground ? spec.ug_durations : spec.durations;
            r.restore = r.start + whole_minutes(lognormal_quantile(model, uniform01(rng)));
            r.customers = discrete_quantile(spec.customers, uniform01(rng));
            records.push_back(std::move(r));
        }
    }

    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < records.size(); ++i) records[i].outage_id = fmt::format("OUT{:06d}", i + 1);

    SynthOutput out;
    for (const auto& c : spec.circuits) {
        out.circuits.circuits.push_back(
            CircuitInfo{c.circuit_id, c.miles, c.underground_miles, c.ug_years, c.customers_served});
        out.circuits.exposures.push_back(
            CircuitUgExposure{c.circuit_id, c.miles, c.underground_miles, c.ug_years, c.ug_outages});
    }

    SynthReport& rep = out.report;
    rep.records = records.size();
    rep.overhead_unscheduled = overhead_count;
    rep.target_median_duration_min = std::exp(spec.durations.log_mean);
    rep.target_median_customers = static_cast<double>(discrete_quantile(spec.customers, 0.5));
    if (overhead_count > 0) {
        std::vector<double> minutes, customers;
        for (const auto& r : records) {
            if (r.system_type != SystemType::DistributionOverhead || is_scheduled(r, scheduled_codes)) continue;
            minutes.push_back(r.duration_minutes());
            customers.push_back(static_cast<double>(r.customers));
        }
        // category records of the same type are included; targets refer to the full population
        rep.median_duration_min = lower_median(minutes);
        rep.tail_fraction_400_min = static_cast<double>(std::count_if(minutes.begin(), minutes.end(),
                                                                      [](double m) { return m <= 400.0; })) /
                                    static_cast<double>(minutes.size());
        rep.median_customers = lower_median(customers);
        rep.mean_customers = std::accumulate(customers.begin(), customers.end(), 0.0) / static_cast<double>(customers.size());
        const double duration_tol = 0.05 * rep.target_median_duration_min + 1.0;
        rep.within_tolerance = std::abs(rep.median_duration_min - rep.target_median_duration_min) <= duration_tol &&
                               rep.median_customers == rep.target_median_customers;
    }
    out.records = std::move(records);
    return out;
}

SynthSpec synth_preset(std::string_view name, std::uint64_t seed) {
    using std::chrono::sys_days;
    using std::chrono::year;
    SynthSpec spec;
    spec.seed = seed;
    spec.customers = default_customer_model();
    const auto years_from_epoch = [&](sys_days d) { return to_years(d - std::chrono::floor<std::chrono::days>(spec.epoch)); };

    if (name == "circuit1") {
        SynthCircuit c;
        c.circuit_id = "CIRCUIT1";
        c.miles = 10.15;
        c.outage_count = 46;
        c.start_offset_years = 0.0;
        c.span_years = 20.0;
        spec.dataset_span_years = 20.0;
        spec.circuits.push_back(c);
        return spec;
    }
    if (name == "storms") {
        SynthCircuit c;
        c.circuit_id = "STORM1";
        c.miles = 25.0;
        c.outage_count = 400;
        c.span_years = 20.0;
        c.storm_clusters = 60;
        c.storm_size = 5;
        spec.dataset_span_years = 20.0;
        spec.circuits.push_back(c);
        return spec;
    }
    if (name != "utility") throw ConfigError(fmt::format("unknown synth preset '{}'", name));

    spec.dataset_span_years = years_from_epoch(sys_days{year{2022} / 6 / 8});
    auto circuit = [&](std::string id, double miles, std::size_t n, sys_days first, sys_days last, std::size_t storms,
                       std::size_t storm_size) {
        SynthCircuit c;
        c.circuit_id = std::move(id);
        c.miles = miles;
        c.outage_count = n;
        c.start_offset_years = years_from_epoch(first);
        c.span_years = years_from_epoch(last) - c.start_offset_years;
        c.storm_clusters = storms;
        c.storm_size = storm_size;
        return c;
    };
    // selected overhead circuits: 46 outages in 46 events, 40 outages in 38 events
    spec.circuits.push_back(circuit("CIRCUIT1", 10.15, 46, sys_days{year{2001} / 6 / 14}, sys_days{year{2020} / 9 / 16}, 0, 2));
    spec.circuits.push_back(circuit("CIRCUIT2", 5.96, 40, sys_days{year{2001} / 11 / 29}, sys_days{year{2018} / 4 / 22}, 1, 3));
    // circuits with existing underground segments
    struct UgRow {
        const char* id;
        double total, ug;
        std::size_t outages;
        double years;
    };
    constexpr std::array<UgRow, 14> ug_rows{{{"CIRCUIT3", 17.03, 8.44, 0, 1.49},   {"CIRCUIT4", 11.50, 8.79, 0, 1.49},
                                             {"CIRCUIT5", 27.15, 9.00, 2, 1.49},   {"CIRCUIT6", 47.50, 29.50, 2, 3.58},
                                             {"CIRCUIT7", 21.35, 2.91, 0, 3.58},   {"CIRCUIT8", 17.74, 2.09, 0, 3.58},
                                             {"CIRCUIT9", 3.99, 0.25, 2, 20.01},   {"CIRCUIT10", 6.95, 1.18, 2, 20.01},
                                             {"CIRCUIT11", 5.28, 0.66, 0, 17.93},  {"CIRCUIT12", 4.67, 0.09, 0, 17.93},
                                             {"CIRCUIT13", 5.59, 0.19, 3, 17.93},  {"CIRCUIT14", 17.13, 1.09, 0, 17.93},
                                             {"CIRCUIT15", 24.15, 0.07, 0, 17.93}, {"CIRCUIT16", 14.35, 0.07, 3, 17.93}}};
    // 476 unscheduled overhead outages in total; 390 spread over the underground circuits
    for (std::size_t i = 0; i < ug_rows.size(); ++i) {
        const auto& r = ug_rows[i];
        SynthCircuit c;
        c.circuit_id = r.id;
        c.miles = r.total;
        c.outage_count = i < 12 ? 28 : 27;
        c.span_years = spec.dataset_span_years;
        c.storm_clusters = 2;
        c.storm_size = 4;
        c.underground_miles = r.ug;
        c.ug_years = r.years;
        c.ug_outages = r.outages;
        spec.circuits.push_back(c);
    }
    spec.categories = {
        {SystemType::DistributionOverhead, 259, 259, ""},
        {SystemType::Substation, 28, 14, ""},
        {SystemType::DistributionUnderground, 10, 10, ""},
        {SystemType::TransmissionOverhead, 11, 5, ""},
        {SystemType::NotReported, 4, 0, ""},
        {SystemType::NotAnOutage, 2, 0, ""},
    };
    return spec;
}

void to_json(nlohmann::json& j, const SynthReport& r) {
    j = nlohmann::json{{"records", r.records},
                       {"overhead_unscheduled", r.overhead_unscheduled},
                       {"target_median_duration_min", r.target_median_duration_min},
                       {"median_duration_min", r.median_duration_min},
                       {"tail_fraction_400_min", r.tail_fraction_400_min},
                       {"target_median_customers", r.target_median_customers},
                       {"median_customers", r.median_customers},
                       {"mean_customers", r.mean_customers},
                       {"within_tolerance", r.within_tolerance}};
}

void to_json(nlohmann::json& j, const SynthSpec& spec) {
    auto circuits = nlohmann::json::array();
    for (const auto& c : spec.circuits) {
        nlohmann::json jc{{"circuit_id", c.circuit_id},     {"miles", c.miles},
                          {"span_years", c.span_years},     {"start_offset_years", c.start_offset_years},
                          {"storm_clusters", c.storm_clusters}, {"storm_size", c.storm_size},
                          {"underground_miles", c.underground_miles}, {"ug_years", c.ug_years},
                          {"ug_outages", c.ug_outages}};
        if (c.outage_count) jc["outage_count"] = *c.outage_count;
        if (c.annual_rate) jc["annual_rate"] = *c.annual_rate;
        if (c.customers_served) jc["customers_served"] = *c.customers_served;
        circuits.push_back(std::move(jc));
    }
    auto categories = nlohmann::json::array();
    for (const auto& c : spec.categories) {
        nlohmann::json jc{{"system_type", std::string(to_label(c.type))}, {"total", c.total}, {"circuit_id", c.circuit_id}};
        if (c.scheduled) jc["scheduled"] = *c.scheduled;
        categories.push_back(std::move(jc));
    }
    j = nlohmann::json{
        {"seed", spec.seed},
        {"epoch", format_iso8601(spec.epoch)},
        {"dataset_span_years", spec.dataset_span_years},
        {"circuits", circuits},
        {"durations", {{"log_mean", spec.durations.log_mean}, {"log_sd", spec.durations.log_sd}}},
        {"ug_durations", {{"log_mean", spec.ug_durations.log_mean}, {"log_sd", spec.ug_durations.log_sd}}},
        {"customers", {{"values", spec.customers.values}, {"weights", spec.customers.weights}}},
        {"categories", categories},
        {"scheduled_fraction", spec.scheduled_fraction},
        {"grouping_threshold_minutes", std::chrono::duration_cast<std::chrono::minutes>(spec.grouping_threshold).count()},
        {"storm_max_gap_minutes", std::chrono::duration_cast<std::chrono::minutes>(spec.storm_max_gap).count()},
        {"storm_priority_restoration", spec.storm_priority_restoration},
    };
}

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
    SynthSpec spec;
    spec.customers = default_customer_model();
    try {
        spec.seed = j.value("seed", spec.seed);
        if (j.contains("epoch")) {
            const auto t = parse_timestamp(j.at("epoch").get<std::string>(), TimestampFormat::Iso8601);
            if (!t) throw ConfigError("synth spec: invalid epoch");
            spec.epoch = *t;
        }
        spec.dataset_span_years = j.value("dataset_span_years", spec.dataset_span_years);
        for (const auto& jc : j.value("circuits", nlohmann::json::array())) {
            SynthCircuit c;
            c.circuit_id = jc.at("circuit_id").get<std::string>();
            c.miles = jc.value("miles", c.miles);
            if (jc.contains("outage_count")) c.outage_count = jc.at("outage_count").get<std::size_t>();
            if (jc.contains("annual_rate")) c.annual_rate = jc.at("annual_rate").get<double>();
            c.span_years = jc.value("span_years", c.span_years);
            c.start_offset_years = jc.value("start_offset_years", c.start_offset_years);
            c.storm_clusters = jc.value("storm_clusters", c.storm_clusters);
            c.storm_size = jc.value("storm_size", c.storm_size);
            c.underground_miles = jc.value("underground_miles", c.underground_miles);
            c.ug_years = jc.value("ug_years", c.ug_years);
            c.ug_outages = jc.value("ug_outages", c.ug_outages);
            if (jc.contains("customers_served")) c.customers_served = jc.at("customers_served").get<std::int64_t>();
            spec.circuits.push_back(std::move(c));
        }
        if (j.contains("durations")) {
            spec.durations.log_mean = j["durations"].value("log_mean", spec.durations.log_mean);
            spec.durations.log_sd = j["durations"].value("log_sd", spec.durations.log_sd);
        }
        if (j.contains("ug_durations")) {
            spec.ug_durations.log_mean = j["ug_durations"].value("log_mean", spec.ug_durations.log_mean);
            spec.ug_durations.log_sd = j["ug_durations"].value("log_sd", spec.ug_durations.log_sd);
        }
        if (j.contains("customers")) {
            spec.customers.values = j["customers"].at("values").get<std::vector<std::int64_t>>();
            spec.customers.weights = j["customers"].at("weights").get<std::vector<double>>();
        }
        for (const auto& jc : j.value("categories", nlohmann::json::array())) {
            CategoryCount c;
            const auto type = parse_system_type(jc.at("system_type").get<std::string>());
            if (!type) throw ConfigError("synth spec: unknown system_type in categories");
            c.type = *type;
            c.total = jc.at("total").get<std::size_t>();
            if (jc.contains("scheduled")) c.scheduled = jc.at("scheduled").get<std::size_t>();
            c.circuit_id = jc.value("circuit_id", std::string{});
            spec.categories.push_back(std::move(c));
        }
        spec.scheduled_fraction = j.value("scheduled_fraction", spec.scheduled_fraction);
        if (j.contains("grouping_threshold_minutes"))
            spec.grouping_threshold = std::chrono::minutes{j["grouping_threshold_minutes"].get<std::int64_t>()};
        if (j.contains("storm_max_gap_minutes"))
            spec.storm_max_gap = std::chrono::minutes{j["storm_max_gap_minutes"].get<std::int64_t>()};
        spec.storm_priority_restoration = j.value("storm_priority_restoration", spec.storm_priority_restoration);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("synth spec: {}", e.what()));
    }
    return spec;
}

} // namespace regrid
