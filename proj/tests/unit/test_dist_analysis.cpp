#include "fixtures.hpp"

#include "regrid/dist_analysis.hpp"
#include "regrid/error.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <numbers>
#include <random>
#include <sstream>

using namespace regrid;

TEST_CASE("single kernel is the standard normal") {
    const std::vector<double> zero{0.0};
    GridSpec g;
    g.range = std::pair{-4.0, 4.0};
    g.points = 801;
    const auto c = kde(zero, BandwidthPolicy::fixed(1.0), g);
    const double phi0 = 1.0 / std::sqrt(2 * std::numbers::pi);
    CHECK(c.density[400] == doctest::Approx(phi0));
    CHECK(c.density[500] == doctest::Approx(phi0 * std::exp(-0.5)));
    CHECK(c.integral() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(c.mode() == doctest::Approx(0.0));
}

TEST_CASE("symmetric pair") {
    const std::vector<double> s{-1.0, 1.0};
    GridSpec g;
    g.points = 1025;
    const auto c = kde(s, BandwidthPolicy::fixed(2.0), g);
    CHECK(c.mode() == doctest::Approx(0.0).epsilon(1e-9));
    for (std::size_t i = 0; i < c.grid.size(); ++i)
        CHECK(c.density[i] == doctest::Approx(c.density[c.grid.size() - 1 - i]).epsilon(1e-12));
}

TEST_CASE("kde errors") {
    const std::vector<double> constant{3, 3, 3};
    CHECK_THROWS_WITH_AS(kde(constant), doctest::Contains("zero variance"), DataError);
    CHECK_THROWS_AS(kde(std::vector<double>{}), DataError);
    CHECK_THROWS_AS(kde(std::vector<double>{1.0}), DataError);
    CHECK_THROWS_AS(kde(std::vector<double>{1.0, 2.0}, BandwidthPolicy::fixed(0.0)), ConfigError);
}

TEST_CASE("silverman bandwidth") {
    const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const double sd = std::sqrt(82.5 / 9.0);
    const double iqr = 7.75 - 3.25;
    CHECK(silverman_bandwidth(s) == doctest::Approx(0.9 * std::min(sd, iqr / 1.34) * std::pow(10.0, -0.2)));
    // IQR of zero falls back to the standard deviation
    const std::vector<double> spiky{1, 1, 1, 1, 1, 1, 1, 1, 9, 20};
    CHECK(silverman_bandwidth(spiky) > 0.0);
}

TEST_CASE("density is non-negative and integrates to one") {
    std::mt19937_64 rng(3);
    std::gamma_distribution<double> g(2.0, 30.0);
    std::vector<double> s(500);
    for (auto& x : s) x = g(rng);
    const auto c = kde(s);
    for (double d : c.density) CHECK(d >= 0.0);
    CHECK(c.integral() >= 0.98);
    CHECK(c.integral() <= 1.02);
    CHECK(c.grid.size() == 1024);
    CHECK(c.grid.front() == doctest::Approx(*std::min_element(s.begin(), s.end()) - 4 * c.bandwidth));
}

TEST_CASE("clipping starts the grid at zero") {
    const std::vector<double> s{1, 2, 3, 5, 8, 13};
    GridSpec g;
    g.clip_at_zero = true;
    CHECK(kde(s, {}, g).grid.front() == 0.0);
}

TEST_CASE("shifting the samples shifts the mode") {
    std::mt19937_64 rng(8);
    std::lognormal_distribution<double> ln(3.0, 0.6);
    std::vector<double> s(300);
    for (auto& x : s) x = ln(rng);
    const auto a = kde(s);
    auto shifted = s;
    for (auto& x : shifted) x += 250.0;
    const auto b = kde(shifted);
    CHECK(b.bandwidth == doctest::Approx(a.bandwidth));
    CHECK(b.mode() - a.mode() == doctest::Approx(250.0).epsilon(1e-9));
}

TEST_CASE("skewness") {
    const std::vector<double> sym{1, 2, 3};
    REQUIRE(skewness(sym));
    CHECK(*skewness(sym) == doctest::Approx(0.0));
    const std::vector<double> sym2{-5, -1, 0, 1, 5};
    CHECK(*skewness(sym2) == doctest::Approx(0.0));
    const std::vector<double> right{1, 1, 1, 100};
    CHECK(*skewness(right) > 0);
    // adjusted Fisher-Pearson against a direct evaluation
    const double n = 4, mean = 25.75;
    double m2 = 0, m3 = 0;
    for (double x : right) {
        m2 += (x - mean) * (x - mean) / n;
        m3 += (x - mean) * (x - mean) * (x - mean) / n;
    }
    CHECK(*skewness(right) == doctest::Approx(m3 / std::pow(m2, 1.5) * std::sqrt(n * (n - 1)) / (n - 2)));
    CHECK_FALSE(skewness(std::vector<double>{1, 2}));
    CHECK_FALSE(skewness(std::vector<double>{2, 2, 2}));

    std::vector<double> affine;
    for (double x : right) affine.push_back(3.5 * x + 40);
    CHECK(*skewness(affine) == doctest::Approx(*skewness(right)));
}

TEST_CASE("summaries") {
    const std::vector<double> s{1, 2, 3};
    const auto st = summarize(s, kde(s));
    CHECK(st.n == 3);
    CHECK(st.mean == 2);
    CHECK(st.median == 2);
    const std::vector<double> skew{1, 1, 1, 100};
    const auto sk = summarize(skew, kde(skew));
    CHECK(sk.mean == doctest::Approx(25.75));
    CHECK(sk.median == 1);
    const nlohmann::json j = sk;
    CHECK(j.contains("skewness"));
}

TEST_CASE("tail probability") {
    const std::vector<double> s{5, 1, 3, 3, 9};
    CHECK(tail_probability(s, 9) == 1.0);
    CHECK(tail_probability(s, 100) == 1.0);
    CHECK(tail_probability(s, 0.5) == 0.0);
    CHECK(tail_probability(s, 3) == doctest::Approx(0.6));
    double prev = 0;
    for (double x = -1; x <= 10; x += 0.25) {
        const double p = tail_probability(s, x);
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("calibrated overhead durations") {
    const auto minutes = fixtures::calibrated_durations();
    CHECK(minutes.size() == 476);
    GridSpec g;
    g.clip_at_zero = true;
    const auto st = summarize(minutes, kde(minutes, {}, g));
    CHECK(st.mode < st.median);
    CHECK(st.median < st.mean);
    CHECK(st.median == doctest::Approx(103).epsilon(0.05));
    CHECK(tail_probability(minutes, 400) == doctest::Approx(0.93).epsilon(0.01 / 0.93));
    REQUIRE(st.skewness);
    CHECK(*st.skewness > 1.0);
}

TEST_CASE("log density pair") {
    const std::vector<double> a{10, 20, 40, 80, 100, 300};
    SUBCASE("identical inputs give identical curves") {
        const auto [x, y] = log_density_pair(a, a);
        CHECK(x.grid == y.grid);
        CHECK(x.density == y.density);
        CHECK(x.transform == Transform::Log10);
    }
    SUBCASE("a factor of ten shifts by one log unit") {
        std::vector<double> b;
        for (double v : a) b.push_back(10 * v);
        const auto [x, y] = log_density_pair(a, b);
        CHECK(x.grid == y.grid);
        CHECK(y.mode() - x.mode() == doctest::Approx(1.0).epsilon(0.01));
        CHECK(y.bandwidth == doctest::Approx(x.bandwidth));
    }
    SUBCASE("non-positive samples are rejected") {
        const std::vector<double> bad{1, 0, 3};
        CHECK_THROWS_AS(log_density_pair(a, bad), DataError);
    }
}

TEST_CASE("underground durations peak right of overhead") {
    const auto utility = generate(synth_preset("utility", 2));
    std::vector<double> oh, ug;
    for (const auto& r : filter_unscheduled_distribution(utility.records)) {
        if (r.duration_minutes() <= 0) continue;
        (r.system_type == SystemType::DistributionOverhead ? oh : ug).push_back(r.duration_minutes());
    }
    REQUIRE(ug.size() == 14);
    const auto [x, y] = log_density_pair(oh, ug);
    CHECK(y.mode() > x.mode());
}

TEST_CASE("density csv") {
    const std::vector<double> s{1, 2, 4};
    std::ostringstream out;
    write_density_csv(out, kde(s, {}, GridSpec{16}));
    std::istringstream in(out.str());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 17);
}
