#include "fixtures.hpp"

#include "regrid/error.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <random>

using namespace regrid;
using fixtures::outage;

TEST_CASE("start-time bunching") {
    std::vector<OutageRecord> recs{outage("a", 0, 1, 1), outage("b", 0.5, 1, 1), outage("c", 5, 1, 1)};
    const auto events = group_events(recs);
    REQUIRE(events.size() == 2);
    CHECK(events[0].outages.size() == 2);
    CHECK(events[1].outages.size() == 1);
    CHECK(events[1].outages[0].outage_id == "c");
}

TEST_CASE("gap equal to the threshold joins, one second more splits") {
    std::vector<OutageRecord> recs{outage("a", 0, 0.1, 1), outage("b", 1.0, 0.1, 1)};
    CHECK(group_events(recs).size() == 1);
    recs[1].start += Seconds{1};
    recs[1].restore += Seconds{1};
    CHECK(group_events(recs).size() == 2);
}

TEST_CASE("chaining follows consecutive starts, not the first start") {
    std::vector<OutageRecord> recs{outage("a", 0, 0.1, 1), outage("b", 0.9, 0.1, 1), outage("c", 1.8, 0.1, 1)};
    CHECK(group_events(recs).size() == 1);
    CHECK(group_events(recs, std::chrono::minutes{30}).size() == 3);
}

TEST_CASE("empty and single inputs") {
    CHECK(group_events({}).empty());
    std::vector<OutageRecord> one{outage("a", 3, 1, 4)};
    const auto e = group_events(one);
    REQUIRE(e.size() == 1);
    CHECK(event_metrics(e[0]).n_outages == 1);
}

TEST_CASE("46 well separated outages form 46 events") {
    const auto recs = fixtures::circuit1_records();
    CHECK(group_events(recs).size() == 46);
}

TEST_CASE("grouping is a partition and independent of input order") {
    auto recs = fixtures::mixed_records(200, 5);
    const auto ref = group_events(recs);
    std::size_t total = 0;
    for (const auto& e : ref) {
        total += e.outages.size();
        for (std::size_t i = 1; i < e.outages.size(); ++i) {
            CHECK(e.outages[i].start - e.outages[i - 1].start <= kDefaultGapThreshold);
            CHECK(e.outages[i - 1].start <= e.outages[i].start);
        }
        CHECK(e.end() >= e.start());
    }
    CHECK(total == recs.size());
    for (std::size_t i = 1; i < ref.size(); ++i)
        CHECK(ref[i].start() - ref[i - 1].outages.back().start > kDefaultGapThreshold);

    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        std::shuffle(recs.begin(), recs.end(), rng);
        const auto again = group_events(recs);
        REQUIRE(again.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(again[i].outages == ref[i].outages);
    }
}

TEST_CASE("event metrics, single outage") {
    std::vector<OutageRecord> recs{outage("a", 0, 2, 10)};
    const auto m = event_metrics(group_events(recs)[0]);
    CHECK(m.n_outages == 1);
    CHECK(m.customers_affected == 10);
    CHECK(m.customer_hours == doctest::Approx(20));
    CHECK(m.outage_hours == doctest::Approx(2));
    CHECK(m.event_duration == doctest::Approx(2));
    CHECK(m.restore_duration == 0);
}

TEST_CASE("event metrics, two overlapping outages") {
    std::vector<OutageRecord> recs{outage("a", 0, 1, 2), outage("b", 0.5, 2, 3)};
    const auto events = group_events(recs);
    REQUIRE(events.size() == 1);
    const auto m = event_metrics(events[0]);
    CHECK(m.n_outages == 2);
    CHECK(m.customers_affected == 5);
    CHECK(m.customer_hours == doctest::Approx(8));
    CHECK(m.outage_hours == doctest::Approx(3));
    CHECK(m.event_duration == doctest::Approx(2.5));
    CHECK(m.restore_duration == doctest::Approx(1.5));
}

TEST_CASE("k identical outages") {
    std::vector<OutageSpan> spans(5, OutageSpan{0.0, 1.5, 7.0});
    const auto m = event_metrics(spans);
    CHECK(m.customer_hours == doctest::Approx(5 * 7 * 1.5));
}

TEST_CASE("metric bounds hold on mixed data") {
    for (const auto& e : group_events(fixtures::mixed_records(300, 9))) {
        const auto m = event_metrics(e);
        CHECK(m.restore_duration <= m.event_duration + 1e-12);
        CHECK(m.customer_hours <= m.customers_affected * m.event_duration + 1e-9);
        CHECK(m.outage_hours >= 0);
    }
}

TEST_CASE("annualize") {
    const auto events = group_events(fixtures::circuit1_records());
    std::vector<EventMetrics> m;
    for (const auto& e : events) m.push_back(event_metrics(e));
    const auto a = annualize(m, 20.0);
    CHECK(a.outages == doctest::Approx(2.3).epsilon(1e-12));
    CHECK(a.customers == doctest::Approx(72.0).epsilon(1e-12));
    CHECK(a.customer_hours == doctest::Approx(184.2).epsilon(1e-12));
    CHECK(a.outage_hours == doctest::Approx(4.93).epsilon(1e-12));

    const auto b = annualize(m, 40.0);
    CHECK(b.customer_hours == doctest::Approx(a.customer_hours / 2));
    const auto empty = annualize({}, 3.0);
    CHECK(empty.outages == 0);
    CHECK(empty.customer_hours == 0);
    CHECK_THROWS_AS(annualize(m, 0.0), ConfigError);
    CHECK_THROWS_AS(annualize(m, -1.0), ConfigError);
}

TEST_CASE("additivity over disjoint events") {
    const auto events = group_events(fixtures::mixed_records(40, 3));
    EventMetrics sum;
    std::vector<OutageSpan> all;
    for (const auto& e : events) {
        const auto m = event_metrics(e);
        sum.customers_affected += m.customers_affected;
        sum.customer_hours += m.customer_hours;
        sum.outage_hours += m.outage_hours;
        sum.n_outages += m.n_outages;
        const auto offset = to_hours(e.start() - events.front().start());
        for (auto s : to_spans(e)) all.push_back({s.start_h + offset, s.restore_h + offset, s.customers});
    }
    const auto whole = event_metrics(all);
    CHECK(whole.n_outages == sum.n_outages);
    CHECK(whole.customers_affected == doctest::Approx(sum.customers_affected));
    CHECK(whole.customer_hours == doctest::Approx(sum.customer_hours));
    CHECK(whole.outage_hours == doctest::Approx(sum.outage_hours));
}

TEST_CASE("reliability indices") {
    std::vector<OutageRecord> one{outage("a", 0, 1, 500)};
    const auto r = reliability_indices(one, 500, 1.0);
    CHECK(r.saifi == doctest::Approx(1));
    CHECK(r.saidi == doctest::Approx(60));
    CHECK(r.caidi == doctest::Approx(60));
    CHECK(r.asai == doctest::Approx(1 - 60 / 525960.0));

    const auto none = reliability_indices({}, 500, 1.0);
    CHECK(none.saifi == 0);
    CHECK(none.saidi == 0);
    CHECK(none.caidi == 0);
    CHECK(none.asai == 1);

    std::vector<OutageRecord> two{outage("a", 0, 1, 500), outage("b", 10, 1, 500)};
    const auto d = reliability_indices(two, 500, 1.0);
    CHECK(d.saifi == doctest::Approx(2 * r.saifi));
    CHECK(d.saidi == doctest::Approx(2 * r.saidi));
    CHECK(d.caidi == doctest::Approx(r.caidi));

    CHECK_THROWS_AS(reliability_indices(one, 0, 1.0), ConfigError);
    CHECK_THROWS_AS(reliability_indices(one, 10, 0.0), ConfigError);
}

TEST_CASE("event exports") {
    const auto events = group_events(fixtures::mixed_records(8, 1));
    std::ostringstream csv;
    write_events_csv(csv, events);
    CHECK(csv.str().find("event") == 0);
    const auto j = events_to_json(events);
    CHECK(j.size() == events.size());
}
