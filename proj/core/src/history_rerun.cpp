#include "regrid/history_rerun.hpp"

#include "regrid/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace regrid {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

using MetricVector = std::array<double, 4>; // outages, customers, customer_hours, outage_hours

MetricVector as_vector(const AnnualMetrics& a) {
    return {a.outages, a.customers, a.customer_hours, a.outage_hours};
}

AnnualMetrics annual_metrics_of(std::span<const OutageRecord> records, double years, Seconds gap) {
    const auto events = group_events(records, gap);
    std::vector<EventMetrics> metrics;
    metrics.reserve(events.size());
    for (const auto& e : events) metrics.push_back(event_metrics(e));
    return annualize(metrics, years);
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += threads) fn(i);
        });
    }
    for (auto& t : workers) t.join();
}

MetricRow make_row(std::string key, std::string label, double base, double after) {
    MetricRow r;
    r.key = std::move(key);
    r.label = std::move(label);
    r.base = base;
    r.after = after;
    r.reduction_pct = reduction_pct(base, after);
    r.retained_mean = after;
    return r;
}

} // namespace

void UndergroundingConfig::validate() const {
    if (!(ug_fraction >= 0.0 && ug_fraction <= 1.0))
        throw ConfigError(fmt::format("ug_fraction must lie in [0, 1], got {}", ug_fraction));
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (gap_threshold.count() < 0) throw ConfigError("gap threshold must be non-negative");
}

void RestorationConfig::validate() const {
    if (!(speedup >= 0.0 && speedup < 1.0))
        throw ConfigError(fmt::format("restoration speedup must lie in [0, 1), got {}", speedup));
}

const MetricRow& RerunResult::row(std::string_view key) const {
    for (const auto& r : rows)
        if (r.key == key) return r;
    throw Error(ErrorKind::Internal, fmt::format("rerun result has no metric '{}'", key));
}

std::optional<double> reduction_pct(double base, double after) {
    if (!(base > 0.0)) return std::nullopt;
    return 100.0 * (base - after) / base;
}

double expected_ug_outages(double lambda_ug, const UndergroundingConfig& config, const CircuitInfo& circuit) {
    const double factor =
        config.length_mode == LengthFactorMode::AsPrinted ? 1.0 - config.ug_fraction : config.ug_fraction;
    return lambda_ug * factor * circuit.total_miles;
}

std::size_t retained_count(std::size_t n, double keep_fraction) {
    const double k = std::floor(keep_fraction * static_cast<double>(n) + 0.5);
    return std::min(n, static_cast<std::size_t>(std::max(0.0, k)));
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial_index) {
    const std::uint64_t a = splitmix64(seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(trial_index + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

std::vector<OutageRecord> sample_retained_overhead(std::span<const OutageRecord> records, double keep_fraction,
                                                   std::mt19937_64& rng) {
    const std::size_t k = retained_count(records.size(), keep_fraction);
    std::vector<OutageRecord> out;
    out.reserve(k);
    // selection sampling over a forward range keeps the input order
    std::sample(records.begin(), records.end(), std::back_inserter(out), k, rng);
    return out;
}

RerunResult rerun_undergrounding(std::span<const OutageRecord> records, const CircuitInfo& circuit,
                                 const UgStats& ug_stats, double years, const UndergroundingConfig& config) {
    config.validate();
    if (records.empty()) throw DataError(fmt::format("circuit {}: no base case (no overhead outages)", circuit.circuit_id));
    if (!(years > 0.0)) throw ConfigError("annualization years must be positive");

    std::vector<OutageRecord> chronological(records.begin(), records.end());
    std::stable_sort(chronological.begin(), chronological.end(),
                     [](const auto& a, const auto& b) { return a.start < b.start; });

    const MetricVector base = as_vector(annual_metrics_of(chronological, years, config.gap_threshold));
    const double keep = 1.0 - config.ug_fraction;

    std::vector<MetricVector> per_trial(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t t) {
        auto rng = trial_rng(config.seed, t);
        const auto subset = sample_retained_overhead(chronological, keep, rng);
        per_trial[t] = as_vector(annual_metrics_of(subset, years, config.gap_threshold));
    });

    // reduce in trial order so the result does not depend on the thread count;
    // shifting by the first trial makes identical trials average exactly
    const MetricVector& pivot = per_trial.front();
    MetricVector mean{}, sd{};
    for (const auto& v : per_trial)
        for (std::size_t m = 0; m < 4; ++m) mean[m] += v[m] - pivot[m];
    for (std::size_t m = 0; m < 4; ++m) mean[m] = pivot[m] + mean[m] / static_cast<double>(config.trials);
    if (config.trials > 1) {
        for (const auto& v : per_trial)
            for (std::size_t m = 0; m < 4; ++m) sd[m] += (v[m] - mean[m]) * (v[m] - mean[m]);
        for (auto& s : sd) s = std::sqrt(s / static_cast<double>(config.trials - 1));
    }

    const double n_ug = expected_ug_outages(ug_stats.lambda_ug, config, circuit);
    const double c = ug_stats.customers(config.customer_statistic);
    const MetricVector ug{n_ug, n_ug * c, n_ug * ug_stats.mean_duration * c, n_ug * ug_stats.mean_duration};

    static const std::array<std::pair<const char*, const char*>, 4> names{{{"outages", "Number of Outages"},
                                                                           {"customers", "Customers Affected"},
                                                                           {"customer_hours", "Customer Hours"},
                                                                           {"outage_hours", "Outage Hours"}}};
    RerunResult result;
    result.kind = RerunKind::Undergrounding;
    result.scope = circuit.circuit_id;
    result.trials_used = config.trials;
    result.years = years;
    result.n_ug = n_ug;
    result.retained_fraction =
        static_cast<double>(retained_count(chronological.size(), keep)) / static_cast<double>(chronological.size());
    for (std::size_t m = 0; m < 4; ++m) {
        auto row = make_row(names[m].first, names[m].second, base[m], mean[m] + ug[m]);
        row.retained_mean = mean[m];
        row.ug_contribution = ug[m];
        row.dispersion = sd[m];
        result.rows.push_back(std::move(row));
    }
    return result;
}

std::vector<OutageSpan> restore_faster(std::span<const OutageSpan> outages, const RestorationConfig& config) {
    config.validate();
    std::vector<OutageSpan> out(outages.begin(), outages.end());
    if (out.empty()) return out;
    const double keep = 1.0 - config.speedup;
    if (config.model == RestorationModel::OutageScaling) {
        for (auto& o : out) o.restore_h = o.start_h + keep * o.duration_h();
        return out;
    }
    double first_restore = out.front().restore_h;
    for (const auto& o : out) first_restore = std::min(first_restore, o.restore_h);
    for (auto& o : out) {
        // an outage that starts after the first restore compresses from its own start
        const double anchor = std::max(first_restore, o.start_h);
        o.restore_h = anchor + keep * (o.restore_h - anchor);
    }
    return out;
}

RerunResult rerun_faster_restoration(std::span<const ResilienceEvent> events, const RestorationConfig& config) {
    config.validate();
    std::array<double, 4> base{}, after{}; // restore_duration, event_duration, customer_hours, outage_hours
    std::size_t used = 0;
    std::set<std::string> circuits;
    for (const auto& e : events) {
        if (e.outages.size() < config.min_event_size) continue;
        const auto spans = to_spans(e);
        const auto b = event_metrics(spans);
        const auto a = event_metrics(restore_faster(spans, config));
        base[0] += b.restore_duration;
        base[1] += b.event_duration;
        base[2] += b.customer_hours;
        base[3] += b.outage_hours;
        after[0] += a.restore_duration;
        after[1] += a.event_duration;
        after[2] += a.customer_hours;
        after[3] += a.outage_hours;
        ++used;
        for (const auto& o : e.outages) circuits.insert(o.circuit_id);
    }
    if (used > 0) {
        for (std::size_t m = 0; m < 4; ++m) {
            base[m] /= static_cast<double>(used);
            after[m] /= static_cast<double>(used);
        }
    }

    static const std::array<std::pair<const char*, const char*>, 4> names{{{"restore_duration", "Restore Duration"},
                                                                           {"event_duration", "Event Duration"},
                                                                           {"customer_hours", "Customer Hours"},
                                                                           {"outage_hours", "Outage Hours"}}};
    std::string scope;
    for (const auto& c : circuits) scope += (scope.empty() ? "" : ",") + c;

    RerunResult result;
    result.kind = RerunKind::FasterRestoration;
    result.scope = scope;
    result.trials_used = 1;
    result.events_used = used;
    for (std::size_t m = 0; m < 4; ++m) result.rows.push_back(make_row(names[m].first, names[m].second, base[m], after[m]));
    return result;
}

void to_json(nlohmann::json& j, const RerunResult& r) {
    auto rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json jr{{"key", row.key},
                          {"label", row.label},
                          {"base", row.base},
                          {"after", row.after},
                          {"dispersion", row.dispersion},
                          {"retained_mean", row.retained_mean},
                          {"ug_contribution", row.ug_contribution}};
        if (row.reduction_pct) jr["reduction_pct"] = *row.reduction_pct;
        rows.push_back(std::move(jr));
    }
    j = nlohmann::json{{"kind", r.kind == RerunKind::Undergrounding ? "undergrounding" : "faster_restoration"},
                       {"scope", r.scope},
                       {"rows", rows},
                       {"trials_used", r.trials_used},
                       {"events_used", r.events_used},
                       {"years", r.years},
                       {"n_ug", r.n_ug},
                       {"retained_fraction", r.retained_fraction}};
}

} // namespace regrid
