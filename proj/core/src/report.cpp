#include "regrid/report.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace regrid {
namespace {

nlohmann::json summary_json(const DatasetSummary& s) {
    auto counts = nlohmann::json::array();
    for (const auto& [key, n] : s.counts) {
        counts.push_back({{"system_type", std::string(to_label(key.first))}, {"scheduled", key.second}, {"count", n}});
    }
    nlohmann::json j{{"total", s.total}, {"span_years", s.span_years}, {"counts", counts}};
    if (s.first_outage) j["first_outage"] = format_iso8601(*s.first_outage);
    if (s.last_outage) j["last_outage"] = format_iso8601(*s.last_outage);
    return j;
}

// Displayed precision of the published tables.
int decimals_for(const MetricRow& row, RerunKind kind) {
    if (kind == RerunKind::FasterRestoration) return row.key == "restore_duration" ? 1 : 2;
    if (row.key == "outage_hours") return 2;
    if (row.key == "outages") return 1;
    return 1;
}

std::string format_value(double v, int decimals) {
    // small annual outage counts keep two significant decimals (e.g. 0.94)
    if (decimals == 1 && std::abs(v) < 1.0 && v != 0.0) decimals = 2;
    return fmt::format("{:.{}f}", v, decimals);
}

std::string format_reduction(const std::optional<double>& pct, RerunKind kind) {
    if (!pct) return "n/a";
    return kind == RerunKind::Undergrounding ? fmt::format("{:.0f}%", *pct) : fmt::format("{:.1f}%", *pct);
}

std::string full(double v) {
    return fmt::format("{}", v);
}

std::string rerun_csv(const RerunResult& r) {
    std::ostringstream out;
    out << "metric,key,base,after,reduction_pct,dispersion,retained_mean,ug_contribution\n";
    for (const auto& row : r.rows) {
        out << fmt::format("{},{},{},{},{},{},{},{}\n", row.label, row.key, full(row.base), full(row.after),
                           row.reduction_pct ? full(*row.reduction_pct) : std::string{}, full(row.dispersion),
                           full(row.retained_mean), full(row.ug_contribution));
    }
    return out.str();
}

std::string safe_name(std::string s) {
    for (auto& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return s;
}

} // namespace

std::string render_rerun_text(const RerunResult& result, const std::string& title) {
    const bool annual = result.kind == RerunKind::Undergrounding;
    const std::string base_h = annual ? "Base (per year)" : "Base (per event)";
    const std::string after_h = annual ? "After (per year)" : "After (per event)";
    std::string out = title + "\n";
    out += fmt::format("{:<20} {:>16} {:>17} {:>10}\n", "Metric", base_h, after_h, "Reduction");
    out += std::string(66, '-') + "\n";
    for (const auto& row : result.rows) {
        const int d = decimals_for(row, result.kind);
        out += fmt::format("{:<20} {:>16} {:>17} {:>10}\n", row.label, format_value(row.base, d),
                           format_value(row.after, d), format_reduction(row.reduction_pct, result.kind));
    }
    if (annual) {
        out += fmt::format("({} trials, {:.2f} years, n_ug = {:.4f}/yr)\n", result.trials_used, result.years,
                           result.n_ug);
    } else {
        out += fmt::format("(means over {} events with two or more outages)\n", result.events_used);
    }
    return out;
}

nlohmann::json to_json(const ReportBundle& b) {
    nlohmann::json j;
    j["mode"] = b.mode;
    if (b.dataset) j["dataset"] = summary_json(*b.dataset);
    if (b.filter) {
        j["filter"] = {{"retained", b.filter->retained},
                       {"excluded_system_type", b.filter->excluded_system_type},
                       {"excluded_scheduled", b.filter->excluded_scheduled}};
    }
    j["parse_issues"] = b.parse_issues;
    auto circuits = nlohmann::json::array();
    for (const auto& c : b.circuits) {
        nlohmann::json jc{{"circuit", c.circuit_id},
                          {"years", c.years},
                          {"n_outages", c.n_outages},
                          {"n_events", c.n_events},
                          {"base", c.base},
                          {"mean_customers", c.mean_customers},
                          {"median_customers", c.median_customers}};
        if (c.reliability) jc["reliability"] = *c.reliability;
        circuits.push_back(std::move(jc));
    }
    j["circuits"] = circuits;
    if (b.pooled_rate) j["pooled_rate"] = *b.pooled_rate;
    if (b.ug_stats) j["ug_stats"] = *b.ug_stats;
    j["ug_fraction"] = b.ug_fraction;
    j["speedup"] = b.speedup;
    auto ug = nlohmann::json::array();
    for (const auto& r : b.undergrounding) ug.push_back(r);
    j["undergrounding"] = ug;
    if (b.restoration) j["restoration"] = *b.restoration;
    auto dens = nlohmann::json::array();
    for (const auto& d : b.densities) {
        nlohmann::json jd{{"name", d.name},
                          {"bandwidth", d.curve.bandwidth},
                          {"transform", d.curve.transform == Transform::Log10 ? "log10" : "identity"},
                          {"grid_points", d.curve.grid.size()},
                          {"mode", d.curve.mode()},
                          {"integral", d.curve.integral()}};
        if (d.stats) jd["stats"] = *d.stats;
        if (d.tail_400) jd["tail_probability_400"] = *d.tail_400;
        dens.push_back(std::move(jd));
    }
    j["densities"] = dens;
    j["warnings"] = b.warnings;
    nlohmann::json prov{{"config_hash", b.provenance.config_hash},
                        {"seed", b.provenance.seed},
                        {"tool_version", b.provenance.tool_version}};
    if (b.provenance.generated_at) prov["generated_at"] = *b.provenance.generated_at;
    j["provenance"] = prov;
    return j;
}

std::vector<RenderedArtifact> render_tables(const ReportBundle& bundle, OutputFormat format) {
    std::vector<RenderedArtifact> out;
    switch (format) {
    case OutputFormat::Json:
        out.push_back({"report.json", to_json(bundle).dump(2) + "\n"});
        break;
    case OutputFormat::Csv: {
        for (const auto& r : bundle.undergrounding)
            out.push_back({"rerun_ug_" + safe_name(r.scope) + ".csv", rerun_csv(r)});
        if (bundle.restoration) out.push_back({"rerun_restore.csv", rerun_csv(*bundle.restoration)});
        if (!bundle.circuits.empty()) {
            std::ostringstream s;
            s << "circuit,years,n_outages,n_events,outages,customers,customer_hours,outage_hours,mean_customers,"
                 "median_customers\n";
            for (const auto& c : bundle.circuits) {
                s << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", c.circuit_id, full(c.years), c.n_outages,
                                 c.n_events, full(c.base.outages), full(c.base.customers), full(c.base.customer_hours),
                                 full(c.base.outage_hours), full(c.mean_customers), full(c.median_customers));
            }
            out.push_back({"base_metrics.csv", s.str()});
        }
        for (const auto& d : bundle.densities) {
            std::ostringstream s;
            write_density_csv(s, d.curve);
            out.push_back({"density_" + safe_name(d.name) + ".csv", s.str()});
        }
        break;
    }
    case OutputFormat::Text: {
        std::string text;
        if (bundle.dataset) {
            text += fmt::format("Dataset: {} outages over {:.2f} years\n", bundle.dataset->total,
                                bundle.dataset->span_years);
            for (const auto& [key, n] : bundle.dataset->counts) {
                text += fmt::format("  {:<28} {:<11} {:>6}\n", to_label(key.first),
                                    key.second ? "scheduled" : "unscheduled", n);
            }
        }
        if (bundle.filter) {
            text += fmt::format("Retained {} unscheduled distribution outages ({} other system types, {} scheduled)\n",
                                bundle.filter->retained, bundle.filter->excluded_system_type,
                                bundle.filter->excluded_scheduled);
        }
        if (bundle.ug_stats) {
            text += fmt::format("Underground: lambda_ug = {:.3f} outages/mile/year, mean duration = {:.2f} h\n",
                                bundle.ug_stats->lambda_ug, bundle.ug_stats->mean_duration);
        }
        for (const auto& c : bundle.circuits) {
            text += fmt::format("{}: {} outages in {} events over {:.2f} years; customers mean {:.1f}, median {:.0f}\n",
                                c.circuit_id, c.n_outages, c.n_events, c.years, c.mean_customers, c.median_customers);
        }
        if (!text.empty()) text += "\n";

        if (bundle.undergrounding.empty()) {
            text += "No undergrounding rerun results in this report.\n\n";
        }
        for (const auto& r : bundle.undergrounding) {
            text += render_rerun_text(
                r, fmt::format("Benefits of undergrounding {:.0f}% of {}", 100.0 * bundle.ug_fraction, r.scope));
            text += "\n";
        }
        if (!bundle.restoration) {
            text += "No faster-restoration rerun results in this report.\n";
        } else {
            text += render_rerun_text(*bundle.restoration,
                                      fmt::format("Benefits of {:.0f}% faster restoration", 100.0 * bundle.speedup));
        }
        for (const auto& d : bundle.densities) {
            if (!d.stats) continue;
            text += fmt::format("\n{}: n={} mean={:.1f} median={:.1f} mode={:.1f}", d.name, d.stats->n, d.stats->mean,
                                d.stats->median, d.stats->mode);
            if (d.stats->skewness) text += fmt::format(" skewness={:.1f}", *d.stats->skewness);
            if (d.tail_400) text += fmt::format(" P(<=400)={:.2f}", *d.tail_400);
        }
        if (!bundle.densities.empty()) text += "\n";
        for (const auto& w : bundle.warnings) text += "warning: " + w + "\n";
        out.push_back({"report.txt", text});
        break;
    }
    }
    return out;
}

} // namespace regrid
