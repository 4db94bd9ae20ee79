#include "regrid/pipeline.hpp"

#include "regrid/atomic_file.hpp"
#include "regrid/error.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#ifndef REGRID_VERSION
#define REGRID_VERSION "0.0.0"
#endif

namespace regrid {
namespace {

constexpr std::array<std::pair<AnalysisMode, std::string_view>, 7> kModes{{
    {AnalysisMode::Ingest, "ingest"},
    {AnalysisMode::StatsUg, "stats-ug"},
    {AnalysisMode::Metrics, "metrics"},
    {AnalysisMode::RerunUg, "rerun-ug"},
    {AnalysisMode::RerunRestore, "rerun-restore"},
    {AnalysisMode::Density, "density"},
    {AnalysisMode::All, "all"},
}};

template <class Fn>
auto step(std::string_view name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", name, e.what()));
    } catch (const DataError& e) {
        throw DataError(fmt::format("{}: {}", name, e.what()));
    } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("{}: {}", name, e.what()));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Internal, fmt::format("{}: {}", name, e.what()));
    } catch (const std::ios_base::failure& e) {
        throw DataError(fmt::format("{}: {}", name, e.what()));
    }
}

std::ifstream open_input(const std::filesystem::path& path, std::string_view what) {
    if (path.empty()) throw ConfigError(fmt::format("no {} path given", what));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open {} '{}'", what, path.string()));
    return in;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

const char* years_name(YearsPolicy p) {
    switch (p) {
    case YearsPolicy::DatasetSpan: return "dataset_span";
    case YearsPolicy::CircuitSpan: return "circuit_span";
    case YearsPolicy::Fixed: return "fixed";
    }
    return "dataset_span";
}

bool needs(AnalysisMode mode, std::initializer_list<AnalysisMode> steps) {
    return mode == AnalysisMode::All || std::find(steps.begin(), steps.end(), mode) != steps.end();
}

std::string now_iso() {
    return format_iso8601(std::chrono::floor<Seconds>(std::chrono::system_clock::now()));
}

} // namespace

std::string_view to_string(AnalysisMode mode) {
    for (const auto& [m, name] : kModes)
        if (m == mode) return name;
    return "all";
}

std::optional<AnalysisMode> parse_mode(std::string_view text) {
    for (const auto& [m, name] : kModes)
        if (name == text) return m;
    return std::nullopt;
}

std::string tool_version() {
    return REGRID_VERSION;
}

void PipelineConfig::validate() const {
    undergrounding.validate();
    restoration.validate();
    if (gap_threshold.count() < 0) throw ConfigError("gap threshold must be non-negative");
    if (years.policy == YearsPolicy::Fixed && !(years.fixed_years > 0.0))
        throw ConfigError("fixed annualization years must be positive");
    if (lambda_ug_override && *lambda_ug_override < 0.0) throw ConfigError("lambda_ug override must be non-negative");
    if (ug_duration_override && *ug_duration_override < 0.0)
        throw ConfigError("underground duration override must be non-negative");
    if (formats.empty()) throw ConfigError("at least one output format is required");
    if (!(outlier.significance > 0.0 && outlier.significance < 1.0))
        throw ConfigError("outlier significance must lie in (0, 1)");
}

PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig c) {
    static const std::set<std::string> known{
        "outages",       "circuits_table", "timestamp_format", "circuits",        "scheduled_codes",
        "case_insensitive_codes", "gap_minutes", "years",     "ug_fraction",     "trials",
        "seed",          "length_mode",    "customer_statistic", "threads",       "speedup",
        "restore_model", "min_event_size", "outlier_rule",    "outlier_significance", "fence_multiplier",
        "lambda_ug",     "ug_duration_hours", "output_dir",   "formats",         "mode",
        "include_timestamp"};
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError(fmt::format("unknown config key '{}'", key));

    try {
        if (j.contains("outages")) c.outages_path = j["outages"].get<std::string>();
        if (j.contains("circuits_table")) c.circuits_path = j["circuits_table"].get<std::string>();
        if (j.contains("timestamp_format")) {
            const auto f = j["timestamp_format"].get<std::string>();
            if (f == "iso8601") c.schema.timestamps = TimestampFormat::Iso8601;
            else if (f == "mdy") c.schema.timestamps = TimestampFormat::MonthDayYear;
            else throw ConfigError(fmt::format("unknown timestamp_format '{}'", f));
        }
        if (j.contains("circuits")) c.circuits = j["circuits"].get<std::vector<std::string>>();
        if (j.contains("scheduled_codes")) {
            const auto codes = j["scheduled_codes"].get<std::vector<std::string>>();
            c.scheduled.codes = std::set<std::string>(codes.begin(), codes.end());
        }
        if (j.contains("case_insensitive_codes")) c.scheduled.case_insensitive = j["case_insensitive_codes"].get<bool>();
        if (j.contains("gap_minutes")) {
            c.gap_threshold = Seconds{std::llround(j["gap_minutes"].get<double>() * 60.0)};
            c.undergrounding.gap_threshold = c.gap_threshold;
        }
        if (j.contains("years")) {
            const auto& y = j["years"];
            if (y.is_number()) {
                c.years = {YearsPolicy::Fixed, y.get<double>()};
            } else {
                const auto s = y.get<std::string>();
                if (s == "dataset_span") c.years.policy = YearsPolicy::DatasetSpan;
                else if (s == "circuit_span") c.years.policy = YearsPolicy::CircuitSpan;
                else throw ConfigError(fmt::format("unknown years policy '{}'", s));
            }
        }
        auto& u = c.undergrounding;
        if (j.contains("ug_fraction")) u.ug_fraction = j["ug_fraction"].get<double>();
        if (j.contains("trials")) u.trials = j["trials"].get<std::size_t>();
        if (j.contains("seed")) u.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("threads")) u.threads = j["threads"].get<unsigned>();
        if (j.contains("length_mode")) {
            const auto s = j["length_mode"].get<std::string>();
            if (s == "complement") u.length_mode = LengthFactorMode::Complement;
            else if (s == "as_printed") u.length_mode = LengthFactorMode::AsPrinted;
            else throw ConfigError(fmt::format("unknown length_mode '{}'", s));
        }
        if (j.contains("customer_statistic")) {
            const auto s = j["customer_statistic"].get<std::string>();
            if (s == "median") u.customer_statistic = CustomerStatistic::Median;
            else if (s == "mean") u.customer_statistic = CustomerStatistic::Mean;
            else throw ConfigError(fmt::format("unknown customer_statistic '{}'", s));
        }
        auto& r = c.restoration;
        if (j.contains("speedup")) r.speedup = j["speedup"].get<double>();
        if (j.contains("min_event_size")) r.min_event_size = j["min_event_size"].get<std::size_t>();
        if (j.contains("restore_model")) {
            const auto s = j["restore_model"].get<std::string>();
            if (s == "restore_phase_scaling") r.model = RestorationModel::RestorePhaseScaling;
            else if (s == "outage_scaling") r.model = RestorationModel::OutageScaling;
            else throw ConfigError(fmt::format("unknown restore_model '{}'", s));
        }
        if (j.contains("outlier_rule")) {
            const auto s = j["outlier_rule"].get<std::string>();
            if (s == "grubbs") c.outlier.rule = OutlierRule::Grubbs;
            else if (s == "tukey") c.outlier.rule = OutlierRule::TukeyFence;
            else if (s == "none") c.outlier.rule = OutlierRule::None;
            else throw ConfigError(fmt::format("unknown outlier_rule '{}'", s));
        }
        if (j.contains("outlier_significance")) c.outlier.significance = j["outlier_significance"].get<double>();
        if (j.contains("fence_multiplier")) c.outlier.fence_multiplier = j["fence_multiplier"].get<double>();
        if (j.contains("lambda_ug")) c.lambda_ug_override = j["lambda_ug"].get<double>();
        if (j.contains("ug_duration_hours")) c.ug_duration_override = j["ug_duration_hours"].get<double>();
        if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("formats")) {
            c.formats.clear();
            for (const auto& f : j["formats"].get<std::vector<std::string>>()) {
                if (f == "text") c.formats.insert(OutputFormat::Text);
                else if (f == "csv") c.formats.insert(OutputFormat::Csv);
                else if (f == "json") c.formats.insert(OutputFormat::Json);
                else throw ConfigError(fmt::format("unknown output format '{}'", f));
            }
        }
        if (j.contains("mode")) {
            const auto m = parse_mode(j["mode"].get<std::string>());
            if (!m) throw ConfigError(fmt::format("unknown mode '{}'", j["mode"].get<std::string>()));
            c.mode = *m;
        }
        if (j.contains("include_timestamp")) c.include_timestamp = j["include_timestamp"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("config: {}", e.what()));
    }
    return c;
}

nlohmann::json semantic_config(const PipelineConfig& c) {
    const auto& u = c.undergrounding;
    const auto& r = c.restoration;
    nlohmann::json j{
        {"outages", c.outages_path.generic_string()},
        {"circuits_table", c.circuits_path.generic_string()},
        {"timestamp_format", c.schema.timestamps == TimestampFormat::Iso8601 ? "iso8601" : "mdy"},
        {"circuits", c.circuits},
        {"scheduled_codes", std::vector<std::string>(c.scheduled.codes.begin(), c.scheduled.codes.end())},
        {"case_insensitive_codes", c.scheduled.case_insensitive},
        {"gap_seconds", c.gap_threshold.count()},
        {"years_policy", years_name(c.years.policy)},
        {"ug_fraction", u.ug_fraction},
        {"trials", u.trials},
        {"seed", u.seed},
        {"length_mode", u.length_mode == LengthFactorMode::Complement ? "complement" : "as_printed"},
        {"customer_statistic", u.customer_statistic == CustomerStatistic::Median ? "median" : "mean"},
        {"speedup", r.speedup},
        {"restore_model", r.model == RestorationModel::RestorePhaseScaling ? "restore_phase_scaling" : "outage_scaling"},
        {"min_event_size", r.min_event_size},
        {"outlier_rule", c.outlier.rule == OutlierRule::Grubbs       ? "grubbs"
                         : c.outlier.rule == OutlierRule::TukeyFence ? "tukey"
                                                                     : "none"},
        {"outlier_significance", c.outlier.significance},
        {"fence_multiplier", c.outlier.fence_multiplier},
        {"mode", std::string(to_string(c.mode))},
    };
    if (c.years.policy == YearsPolicy::Fixed) j["fixed_years"] = c.years.fixed_years;
    if (c.lambda_ug_override) j["lambda_ug"] = *c.lambda_ug_override;
    if (c.ug_duration_override) j["ug_duration_hours"] = *c.ug_duration_override;
    return j;
}

std::string config_hash(const PipelineConfig& config) {
    return fmt::format("{:016x}", fnv1a64(semantic_config(config).dump()));
}

ReportBundle run_pipeline(const PipelineConfig& config) {
    step("config", [&] { config.validate(); });

    ReportBundle bundle;
    bundle.mode = std::string(to_string(config.mode));
    bundle.ug_fraction = config.undergrounding.ug_fraction;
    bundle.speedup = config.restoration.speedup;
    bundle.provenance = Provenance{config_hash(config), config.undergrounding.seed, tool_version(),
                                   config.include_timestamp ? std::optional<std::string>(now_iso()) : std::nullopt};

    // ingest
    auto [all_records, filtered] = step("ingest", [&] {
        auto in = open_input(config.outages_path, "outages file");
        auto parsed = parse_outages(in, config.schema);
        bundle.parse_issues = parsed.issues.size();
        for (const auto& issue : parsed.issues) {
            if (issue.kept) bundle.warnings.push_back(fmt::format("row {}: {}", issue.row, issue.reason));
        }
        bundle.dataset = summarize_dataset(parsed.records, config.scheduled);
        bundle.filter = filter_breakdown(parsed.records, config.scheduled);
        auto kept = filter_unscheduled_distribution(parsed.records, config.scheduled);
        return std::pair{std::move(parsed.records), std::move(kept)};
    });
    (void)all_records;
    if (config.mode == AnalysisMode::Ingest) return bundle;

    const auto overhead = select_system_type(filtered, SystemType::DistributionOverhead);
    const auto underground = select_system_type(filtered, SystemType::DistributionUnderground);

    std::optional<CircuitTable> table;
    if (!config.circuits_path.empty() || needs(config.mode, {AnalysisMode::StatsUg, AnalysisMode::RerunUg})) {
        table = step("circuits", [&] {
            auto in = open_input(config.circuits_path, "circuit table");
            return parse_circuit_table(in);
        });
    }

    if (needs(config.mode, {AnalysisMode::StatsUg, AnalysisMode::RerunUg})) {
        step("stats-ug", [&] {
            UgStats s;
            if (config.lambda_ug_override) {
                s.lambda_ug = *config.lambda_ug_override;
            } else {
                bundle.pooled_rate = pooled_ug_rate(table->exposures, config.outlier);
                s.lambda_ug = bundle.pooled_rate->lambda_ug;
            }
            if (config.ug_duration_override) {
                s.mean_duration = *config.ug_duration_override;
            } else {
                std::vector<double> hours;
                for (const auto& r : underground) hours.push_back(r.duration_hours());
                s.mean_duration = ug_duration_mean(hours);
            }
            bundle.ug_stats = s;
        });
    }

    // circuit selection
    std::vector<std::string> selected = config.circuits;
    if (selected.empty() && config.mode != AnalysisMode::StatsUg && config.mode != AnalysisMode::Density) {
        std::set<std::string> with_outages;
        for (const auto& r : overhead) with_outages.insert(r.circuit_id);
        if (table) {
            for (const auto& c : table->circuits)
                if (c.underground_miles == 0.0 && with_outages.count(c.circuit_id)) selected.push_back(c.circuit_id);
        } else {
            selected.assign(with_outages.begin(), with_outages.end());
        }
    }
    auto circuit_info = [&](const std::string& id) -> std::optional<CircuitInfo> {
        if (!table) return std::nullopt;
        for (const auto& c : table->circuits)
            if (c.circuit_id == id) return c;
        return std::nullopt;
    };

    std::vector<ResilienceEvent> restoration_events;
    if (needs(config.mode, {AnalysisMode::Metrics, AnalysisMode::RerunUg, AnalysisMode::RerunRestore})) {
        for (const auto& id : selected) {
            step(fmt::format("metrics[{}]", id), [&] {
                auto sel = select_circuit(overhead, id);
                if (sel.warning) {
                    bundle.warnings.push_back(*sel.warning);
                    return;
                }
                CircuitReport rep;
                rep.circuit_id = id;
                rep.n_outages = sel.records.size();
                switch (config.years.policy) {
                case YearsPolicy::DatasetSpan: rep.years = bundle.dataset->span_years; break;
                case YearsPolicy::CircuitSpan: rep.years = span_years(sel.records); break;
                case YearsPolicy::Fixed: rep.years = config.years.fixed_years; break;
                }
                auto events = group_events(sel.records, config.gap_threshold);
                std::vector<EventMetrics> metrics;
                for (const auto& e : events) metrics.push_back(event_metrics(e));
                rep.n_events = events.size();
                rep.base = annualize(metrics, rep.years);
                rep.mean_customers = typical_customers(sel.records, CustomerStatistic::Mean);
                rep.median_customers = typical_customers(sel.records, CustomerStatistic::Median);
                const auto info = circuit_info(id);
                if (info && info->customers_served)
                    rep.reliability = reliability_indices(sel.records, *info->customers_served, rep.years);

                if (needs(config.mode, {AnalysisMode::RerunUg})) {
                    if (!info) throw DataError(fmt::format("circuit {} missing from circuit table", id));
                    UgStats s = *bundle.ug_stats;
                    s.mean_customers = rep.mean_customers;
                    s.median_customers = rep.median_customers;
                    auto ug = config.undergrounding;
                    ug.gap_threshold = config.gap_threshold;
                    bundle.undergrounding.push_back(rerun_undergrounding(sel.records, *info, s, rep.years, ug));
                }
                for (auto& e : events) restoration_events.push_back(std::move(e));
                bundle.circuits.push_back(std::move(rep));
            });
        }
    }

    if (needs(config.mode, {AnalysisMode::RerunRestore})) {
        bundle.restoration = step("rerun-restore", [&] {
            return rerun_faster_restoration(restoration_events, config.restoration);
        });
    }

    if (needs(config.mode, {AnalysisMode::Density})) {
        step("density", [&] {
            std::vector<double> minutes, customers, ug_minutes;
            for (const auto& r : overhead) {
                minutes.push_back(r.duration_minutes());
                customers.push_back(static_cast<double>(r.customers));
            }
            for (const auto& r : underground) ug_minutes.push_back(r.duration_minutes());
            if (minutes.size() < 2) {
                bundle.warnings.push_back("density: fewer than two overhead outages");
                return;
            }
            GridSpec clipped;
            clipped.clip_at_zero = true;
            DensityReport durations{"overhead_duration_minutes", kde(minutes, {}, clipped), std::nullopt,
                                    tail_probability(minutes, 400.0)};
            durations.stats = summarize(minutes, durations.curve);
            bundle.densities.push_back(std::move(durations));
            DensityReport cust{"overhead_customers", kde(customers, {}, clipped), std::nullopt, std::nullopt};
            cust.stats = summarize(customers, cust.curve);
            bundle.densities.push_back(std::move(cust));

            auto positive = [](std::vector<double> v) {
                v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !(x > 0.0); }), v.end());
                return v;
            };
            const auto oh_pos = positive(minutes);
            const auto ug_pos = positive(ug_minutes);
            const auto distinct = [](const std::vector<double>& v) {
                return v.size() >= 2 && std::any_of(v.begin(), v.end(), [&](double x) { return x != v.front(); });
            };
            if (distinct(oh_pos) && distinct(ug_pos)) {
                auto [a, b] = log_density_pair(oh_pos, ug_pos);
                bundle.densities.push_back({"log10_overhead_duration_minutes", std::move(a), std::nullopt, std::nullopt});
                bundle.densities.push_back({"log10_underground_duration_minutes", std::move(b), std::nullopt, std::nullopt});
            } else {
                bundle.warnings.push_back("density: not enough underground durations for the log comparison");
            }
        });
    }
    return bundle;
}

std::vector<std::filesystem::path> write_report(const ReportBundle& bundle, const PipelineConfig& config) {
    std::vector<std::filesystem::path> written;
    step("report", [&] {
        for (auto format : config.formats) {
            for (const auto& artifact : render_tables(bundle, format)) {
                const auto path = config.output_dir / artifact.filename;
                write_file_atomic(path, artifact.content);
                written.push_back(path);
            }
        }
    });
    return written;
}

} // namespace regrid
