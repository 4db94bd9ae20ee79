#include "fixtures.hpp"

#include "regrid/error.hpp"
#include "regrid/pipeline.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

using namespace regrid;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("regrid-unit-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// CIRCUIT1 fixture plus the underground exposure table, written to disk.
PipelineConfig circuit1_config(const std::string& name) {
    const auto dir = scratch(name);
    {
        std::ofstream out(dir / "outages.csv");
        write_outages(out, fixtures::circuit1_records());
    }
    {
        auto table = fixtures::table3();
        table.circuits.insert(table.circuits.begin(), fixtures::circuit1_info());
        table.exposures.insert(table.exposures.begin(), CircuitUgExposure{"CIRCUIT1", 10.15, 0, 0, 0});
        std::ofstream out(dir / "circuits.csv");
        write_circuit_table(out, table);
    }
    PipelineConfig c;
    c.outages_path = dir / "outages.csv";
    c.circuits_path = dir / "circuits.csv";
    c.output_dir = dir / "out";
    c.years = {YearsPolicy::Fixed, 20.0};
    c.ug_duration_override = 2.35;
    c.include_timestamp = false;
    c.undergrounding.trials = 400;
    c.undergrounding.threads = 2;
    return c;
}

} // namespace

TEST_CASE("mode names") {
    for (auto m : {AnalysisMode::Ingest, AnalysisMode::StatsUg, AnalysisMode::Metrics, AnalysisMode::RerunUg,
                   AnalysisMode::RerunRestore, AnalysisMode::Density, AnalysisMode::All})
        CHECK(parse_mode(to_string(m)) == m);
    CHECK_FALSE(parse_mode("everything"));
}

TEST_CASE("config json overlay") {
    const auto c = config_from_json(nlohmann::json{{"ug_fraction", 0.5},
                                                   {"trials", 10},
                                                   {"seed", 7},
                                                   {"years", 12.5},
                                                   {"gap_minutes", 30},
                                                   {"length_mode", "as_printed"},
                                                   {"restore_model", "outage_scaling"},
                                                   {"formats", {"csv"}},
                                                   {"outlier_rule", "tukey"},
                                                   {"circuits", {"A", "B"}}});
    CHECK(c.undergrounding.ug_fraction == 0.5);
    CHECK(c.undergrounding.trials == 10);
    CHECK(c.undergrounding.seed == 7);
    CHECK(c.years.policy == YearsPolicy::Fixed);
    CHECK(c.years.fixed_years == 12.5);
    CHECK(c.gap_threshold == std::chrono::minutes{30});
    CHECK(c.undergrounding.length_mode == LengthFactorMode::AsPrinted);
    CHECK(c.restoration.model == RestorationModel::OutageScaling);
    CHECK(c.formats == std::set<OutputFormat>{OutputFormat::Csv});
    CHECK(c.outlier.rule == OutlierRule::TukeyFence);
    CHECK(c.circuits.size() == 2);

    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"trials", "many"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"length_mode", "sideways"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), ConfigError);
}

TEST_CASE("config hash tracks semantic fields only") {
    PipelineConfig base;
    const auto h = config_hash(base);
    CHECK(h.size() == 16);
    CHECK(config_hash(base) == h);

    auto threads = base;
    threads.undergrounding.threads = 7;
    threads.output_dir = "elsewhere";
    threads.formats = {OutputFormat::Csv};
    threads.include_timestamp = false;
    CHECK(config_hash(threads) == h);

    std::vector<PipelineConfig> changed(8, base);
    changed[0].undergrounding.seed += 1;
    changed[1].undergrounding.ug_fraction = 0.7;
    changed[2].undergrounding.trials = 100;
    changed[3].restoration.speedup = 0.2;
    changed[4].gap_threshold = std::chrono::minutes{30};
    changed[5].circuits = {"X"};
    changed[6].lambda_ug_override = 0.1;
    changed[7].outages_path = "other.csv";
    std::set<std::string> hashes{h};
    for (const auto& c : changed) hashes.insert(config_hash(c));
    CHECK(hashes.size() == changed.size() + 1);
}

TEST_CASE("pipeline on the single-circuit fixture matches the closed form") {
    auto c = circuit1_config("closed-form");
    c.lambda_ug_override = 0.12;
    const auto b = run_pipeline(c);
    REQUIRE(b.circuits.size() == 1);
    CHECK(b.circuits[0].circuit_id == "CIRCUIT1");
    CHECK(b.circuits[0].n_events == 46);
    CHECK(b.circuits[0].base.outages == doctest::Approx(2.3));
    CHECK(b.circuits[0].median_customers == 2);
    REQUIRE(b.undergrounding.size() == 1);
    const auto& r = b.undergrounding[0];
    const double keep = 9.0 / 46.0, n = 0.9744;
    CHECK(r.row("outages").after == doctest::Approx(2.3 * keep + n));
    const auto& ch = r.row("customer_hours");
    CHECK(std::abs(ch.after - (184.2 * keep + n * 2.35 * 2)) <= 4 * ch.dispersion / std::sqrt(400.0));
    REQUIRE(b.restoration);
    CHECK(b.restoration->events_used == 0);
    CHECK(b.provenance.config_hash == config_hash(c));
    CHECK_FALSE(b.provenance.generated_at);
}

TEST_CASE("pooled rate comes from the circuit table when not overridden") {
    auto c = circuit1_config("pooled");
    c.mode = AnalysisMode::StatsUg;
    const auto b = run_pipeline(c);
    REQUIRE(b.pooled_rate);
    CHECK(b.pooled_rate->lambda_ug == doctest::Approx(0.1179).epsilon(0.001));
    REQUIRE(b.ug_stats);
    CHECK(b.ug_stats->mean_duration == 2.35);
    CHECK(b.undergrounding.empty());
}

TEST_CASE("one trial with nothing undergrounded reports zero reductions") {
    auto c = circuit1_config("identity");
    c.undergrounding.trials = 1;
    c.undergrounding.ug_fraction = 0.0;
    c.restoration.speedup = 0.0;
    const auto b = run_pipeline(c);
    for (const auto& row : b.undergrounding.at(0).rows) CHECK(*row.reduction_pct == 0.0);
}

TEST_CASE("identical runs give byte-identical json") {
    auto c = circuit1_config("repeat");
    const auto a = to_json(run_pipeline(c)).dump();
    const auto b = to_json(run_pipeline(c)).dump();
    CHECK(a == b);
}

TEST_CASE("errors carry the step name and kind") {
    auto c = circuit1_config("errors");
    c.outages_path = "/nonexistent/outages.csv";
    CHECK_THROWS_WITH_AS(run_pipeline(c), doctest::Contains("ingest:"), ConfigError);
    try {
        run_pipeline(c);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }

    auto d = circuit1_config("errors2");
    {
        std::ofstream out(d.circuits_path);
        out << "circuit,total_miles\nCIRCUIT1,3\n";
    }
    try {
        run_pipeline(d);
        FAIL("expected a data error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Data);
        CHECK(std::string(e.what()).find("circuits:") == 0);
    }

    auto bad = circuit1_config("errors3");
    bad.undergrounding.ug_fraction = 2.0;
    CHECK_THROWS_AS(run_pipeline(bad), ConfigError);
}

TEST_CASE("unknown circuits produce a warning, not a failure") {
    auto c = circuit1_config("warn");
    c.circuits = {"CIRCUIT1", "GHOST"};
    c.mode = AnalysisMode::Metrics;
    const auto b = run_pipeline(c);
    CHECK(b.circuits.size() == 1);
    REQUIRE(b.warnings.size() == 1);
    CHECK(b.warnings[0].find("GHOST") != std::string::npos);
}

TEST_CASE("text tables") {
    auto c = circuit1_config("text");
    c.mode = AnalysisMode::RerunUg;
    const auto b = run_pipeline(c);
    const auto text = render_tables(b, OutputFormat::Text).at(0).content;
    for (const char* label : {"Number of Outages", "Customers Affected", "Customer Hours", "Outage Hours",
                              "Base (per year)", "After (per year)", "Reduction"})
        CHECK(text.find(label) != std::string::npos);
    CHECK(text.find("No faster-restoration rerun results") != std::string::npos);

    ReportBundle empty;
    const auto none = render_tables(empty, OutputFormat::Text).at(0).content;
    CHECK(none.find("No undergrounding rerun results") != std::string::npos);
}

TEST_CASE("text rounding follows the table conventions") {
    RerunResult r;
    r.kind = RerunKind::Undergrounding;
    r.rows = {{"outages", "Number of Outages", 2.3, 1.4244, reduction_pct(2.3, 1.4244), 0, 0, 0},
              {"customers", "Customers Affected", 72.0, 16.04, reduction_pct(72.0, 16.04), 0, 0, 0},
              {"customer_hours", "Customer Hours", 184.2, 40.62, reduction_pct(184.2, 40.62), 0, 0, 0},
              {"outage_hours", "Outage Hours", 4.93, 3.254, reduction_pct(4.93, 3.254), 0, 0, 0}};
    const auto t = render_rerun_text(r, "title");
    CHECK(t.find("2.3") != std::string::npos);
    CHECK(t.find("184.2") != std::string::npos);
    CHECK(t.find("4.93") != std::string::npos);
    CHECK(t.find("38%") != std::string::npos);
    CHECK(t.find("78%") != std::string::npos);

    r.kind = RerunKind::FasterRestoration;
    r.rows = {{"restore_duration", "Restore Duration", 13.1, 11.8162, reduction_pct(13.1, 11.8162), 0, 0, 0}};
    CHECK(render_rerun_text(r, "t").find("9.8%") != std::string::npos);
}

TEST_CASE("json and csv keep full precision") {
    auto c = circuit1_config("json");
    c.formats = {OutputFormat::Json, OutputFormat::Csv, OutputFormat::Text};
    const auto b = run_pipeline(c);
    const auto written = write_report(b, c);
    CHECK(written.size() >= 4);
    for (const auto& p : written) {
        CHECK(fs::exists(p));
        CHECK_FALSE(fs::exists(p.string() + ".tmp"));
    }

    std::ifstream in(c.output_dir / "report.json");
    const auto j = nlohmann::json::parse(in);
    const auto& rows = j["undergrounding"][0]["rows"];
    for (std::size_t m = 0; m < 4; ++m) {
        CHECK(rows[m]["after"].get<double>() == b.undergrounding[0].rows[m].after);
        CHECK(rows[m]["base"].get<double>() == b.undergrounding[0].rows[m].base);
    }
    CHECK(j["provenance"]["config_hash"] == config_hash(c));
    CHECK(j["provenance"].contains("tool_version"));
    CHECK(j["circuits"][0]["base"]["customer_hours"].get<double>() == b.circuits[0].base.customer_hours);

    std::ifstream csv(c.output_dir / "rerun_ug_CIRCUIT1.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header.find("reduction_pct") != std::string::npos);
}

TEST_CASE("small csv fixture through every step") {
    PipelineConfig c;
    c.outages_path = fixtures::fixture_path("outages_small.csv");
    c.circuits_path = fixtures::fixture_path("circuits_small.csv");
    c.include_timestamp = false;
    c.undergrounding.trials = 20;
    const auto b = run_pipeline(c);
    REQUIRE(b.filter);
    CHECK(b.filter->retained == 7);
    CHECK(b.filter->excluded_scheduled == 1);
    CHECK(b.filter->excluded_system_type == 1);
    REQUIRE(b.circuits.size() == 1);
    CHECK(b.circuits[0].n_outages == 5);
    CHECK(b.circuits[0].n_events == 4);
    CHECK(b.circuits[0].reliability);
    CHECK(b.ug_stats->mean_duration == doctest::Approx(2.25));
    REQUIRE(b.restoration);
    CHECK(b.restoration->events_used == 1);
    CHECK(b.restoration->row("restore_duration").base == doctest::Approx(0.5));
    CHECK(b.densities.size() == 4);
}
