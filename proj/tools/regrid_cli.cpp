// regrid: command line front end for the outage rerun pipeline.

#include "regrid/atomic_file.hpp"
#include "regrid/error.hpp"
#include "regrid/pipeline.hpp"
#include "regrid/synth_gen.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

enum Exit { kOk = 0, kConfig = 2, kData = 3, kInternal = 4 };

struct Flags {
    std::string config_file;
    std::optional<std::string> outages;
    std::optional<std::string> circuits_table;
    std::vector<std::string> circuits;
    std::optional<std::string> timestamp_format;
    std::optional<double> gap_minutes;
    std::optional<std::string> years;
    std::optional<double> ug_fraction;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> length_mode;
    std::optional<std::string> customer_statistic;
    std::optional<unsigned> threads;
    std::optional<double> speedup;
    std::optional<std::string> restore_model;
    std::optional<std::string> outlier_rule;
    std::optional<double> lambda_ug;
    std::optional<double> ug_duration;
    std::optional<std::string> out;
    std::vector<std::string> formats;
    bool no_timestamp = false;
    bool quiet = false;
};

struct SynthFlags {
    std::string preset;
    std::string spec_file;
    std::optional<std::uint64_t> seed;
    std::string out = "synth-out";
};

void add_pipeline_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("-c,--config", f.config_file, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--outages", f.outages, "Outage CSV");
    cmd->add_option("--circuits-table", f.circuits_table, "Circuit / underground exposure CSV");
    cmd->add_option("--circuit", f.circuits, "Circuit to analyse (repeatable)");
    cmd->add_option("--timestamp-format", f.timestamp_format, "iso8601 or mdy");
    cmd->add_option("--gap-minutes", f.gap_minutes, "Event grouping threshold in minutes");
    cmd->add_option("--years", f.years, "dataset_span, circuit_span or a number of years");
    cmd->add_option("--ug-fraction", f.ug_fraction, "Fraction of overhead length undergrounded");
    cmd->add_option("--trials", f.trials, "Monte Carlo trials");
    cmd->add_option("--seed", f.seed, "Random seed");
    cmd->add_option("--length-mode", f.length_mode, "complement or as_printed");
    cmd->add_option("--customer-statistic", f.customer_statistic, "median or mean");
    cmd->add_option("--threads", f.threads, "Worker threads, 0 for all cores");
    cmd->add_option("--speedup", f.speedup, "Restoration speedup fraction");
    cmd->add_option("--restore-model", f.restore_model, "restore_phase_scaling or outage_scaling");
    cmd->add_option("--outlier-rule", f.outlier_rule, "grubbs, tukey or none");
    cmd->add_option("--lambda-ug", f.lambda_ug, "Override the pooled underground rate");
    cmd->add_option("--ug-duration", f.ug_duration, "Override the mean underground duration (hours)");
    cmd->add_option("-o,--out", f.out, "Output directory");
    cmd->add_option("--format", f.formats, "text, csv or json (repeatable)");
    cmd->add_flag("--no-timestamp", f.no_timestamp, "Omit the generation time from reports");
    cmd->add_flag("-q,--quiet", f.quiet, "Do not print the text report");
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw regrid::ConfigError(fmt::format("cannot open config '{}'", path));
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw regrid::ConfigError(fmt::format("config '{}': {}", path, e.what()));
    }
}

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("REGRID_SEED");
    if (!s || !*s) return std::nullopt;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != std::string_view(s).size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw regrid::ConfigError(fmt::format("REGRID_SEED is not an unsigned integer: '{}'", s));
    }
}

// Precedence: flags > REGRID_SEED > config file > defaults.
regrid::PipelineConfig build_config(const Flags& f, regrid::AnalysisMode mode) {
    nlohmann::json j = f.config_file.empty() ? nlohmann::json::object() : read_json_file(f.config_file);
    if (!j.is_object()) throw regrid::ConfigError("config file must hold a JSON object");
    j["mode"] = std::string(regrid::to_string(mode));
    if (const auto s = env_seed()) j["seed"] = *s;

    if (f.outages) j["outages"] = *f.outages;
    if (f.circuits_table) j["circuits_table"] = *f.circuits_table;
    if (!f.circuits.empty()) j["circuits"] = f.circuits;
    if (f.timestamp_format) j["timestamp_format"] = *f.timestamp_format;
    if (f.gap_minutes) j["gap_minutes"] = *f.gap_minutes;
    if (f.years) {
        char* end = nullptr;
        const double y = std::strtod(f.years->c_str(), &end);
        if (end && *end == '\0' && !f.years->empty()) j["years"] = y;
        else j["years"] = *f.years;
    }
    if (f.ug_fraction) j["ug_fraction"] = *f.ug_fraction;
    if (f.trials) j["trials"] = *f.trials;
    if (f.seed) j["seed"] = *f.seed;
    if (f.length_mode) j["length_mode"] = *f.length_mode;
    if (f.customer_statistic) j["customer_statistic"] = *f.customer_statistic;
    if (f.threads) j["threads"] = *f.threads;
    if (f.speedup) j["speedup"] = *f.speedup;
    if (f.restore_model) j["restore_model"] = *f.restore_model;
    if (f.outlier_rule) j["outlier_rule"] = *f.outlier_rule;
    if (f.lambda_ug) j["lambda_ug"] = *f.lambda_ug;
    if (f.ug_duration) j["ug_duration_hours"] = *f.ug_duration;
    if (f.out) j["output_dir"] = *f.out;
    if (!f.formats.empty()) j["formats"] = f.formats;
    if (f.no_timestamp) j["include_timestamp"] = false;
    return regrid::config_from_json(j);
}

int run_analysis(const Flags& f, regrid::AnalysisMode mode) {
    const auto config = build_config(f, mode);
    const auto bundle = regrid::run_pipeline(config);
    const auto written = regrid::write_report(bundle, config);
    if (!f.quiet) {
        for (const auto& artifact : regrid::render_tables(bundle, regrid::OutputFormat::Text)) std::cout << artifact.content;
    }
    for (const auto& p : written) std::cerr << "wrote " << p.string() << "\n";
    return kOk;
}

int run_synth(const SynthFlags& f) {
    if (f.preset.empty() == f.spec_file.empty()) throw regrid::ConfigError("synth needs exactly one of --preset or --spec");
    std::uint64_t seed = 1;
    if (const auto s = env_seed()) seed = *s;
    if (f.seed) seed = *f.seed;

    regrid::SynthSpec spec;
    if (!f.preset.empty()) {
        spec = regrid::synth_preset(f.preset, seed);
    } else {
        const auto j = read_json_file(f.spec_file);
        spec = regrid::synth_spec_from_json(j);
        if (f.seed || env_seed()) spec.seed = seed;
    }
    const auto out = regrid::generate(spec);

    namespace fs = std::filesystem;
    std::ostringstream outages, circuits;
    regrid::write_outages(outages, out.records);
    regrid::write_circuit_table(circuits, out.circuits);
    regrid::write_file_atomic(fs::path(f.out) / "outages.csv", outages.str());
    regrid::write_file_atomic(fs::path(f.out) / "circuits.csv", circuits.str());
    nlohmann::json report = out.report;
    regrid::write_file_atomic(fs::path(f.out) / "synth_report.json", report.dump(2) + "\n");
    std::cout << fmt::format("{} records ({} unscheduled overhead); median duration {:.0f} min (target {:.0f}); "
                             "median customers {:.0f}; P(<=400 min) = {:.3f}\n",
                             out.report.records, out.report.overhead_unscheduled, out.report.median_duration_min,
                             out.report.target_median_duration_min, out.report.median_customers,
                             out.report.tail_fraction_400_min);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rerun outage history for undergrounding and faster restoration"};
    app.set_version_flag("--version", regrid::tool_version());
    app.require_subcommand(1);

    Flags flags;
    SynthFlags synth;
    std::optional<regrid::AnalysisMode> mode;

    const std::vector<std::pair<std::string, std::string>> analyses{
        {"ingest", "Parse and filter outages, summarise the dataset"},
        {"stats-ug", "Pooled underground outage rate and duration"},
        {"metrics", "Base-case annual metrics per circuit"},
        {"rerun-ug", "Rerun history with part of each circuit undergrounded"},
        {"rerun-restore", "Rerun history with faster restoration"},
        {"density", "Kernel density estimates of durations and customers"},
        {"all", "Every analysis step"},
    };
    for (const auto& [name, help] : analyses) {
        auto* cmd = app.add_subcommand(name, help);
        add_pipeline_flags(cmd, flags);
        cmd->callback([&mode, n = name] { mode = regrid::parse_mode(n); });
    }
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic outage dataset");
    synth_cmd->add_option("--preset", synth.preset, "utility, circuit1 or storms");
    synth_cmd->add_option("--spec", synth.spec_file, "JSON generator spec")->check(CLI::ExistingFile);
    synth_cmd->add_option("--seed", synth.seed, "Random seed");
    synth_cmd->add_option("-o,--out", synth.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (synth_cmd->parsed()) return run_synth(synth);
        if (!mode) throw regrid::Error(regrid::ErrorKind::Internal, "no analysis selected");
        return run_analysis(flags, *mode);
    } catch (const regrid::Error& e) {
        std::cerr << "regrid: " << e.what() << "\n";
        switch (e.kind()) {
        case regrid::ErrorKind::Config: return kConfig;
        case regrid::ErrorKind::Data: return kData;
        case regrid::ErrorKind::Internal: return kInternal;
        }
        return kInternal;
    } catch (const std::exception& e) {
        std::cerr << "regrid: internal error: " << e.what() << "\n";
        return kInternal;
    }
}
