#pragma once

// Shared datasets for unit and acceptance tests.

#include "regrid/event_engine.hpp"
#include "regrid/outage_store.hpp"
#include "regrid/synth_gen.hpp"
#include "regrid/ug_stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace fixtures {

using namespace regrid;

#ifndef REGRID_FIXTURE_DIR
#define REGRID_FIXTURE_DIR "."
#endif

inline std::string fixture_path(const std::string& name) {
    return std::string(REGRID_FIXTURE_DIR) + "/" + name;
}

inline TimePoint epoch() {
    return std::chrono::sys_days{std::chrono::year{2001} / 1 / 1};
}

inline OutageRecord outage(std::string id, double start_h, double duration_h, std::int64_t customers,
                           std::string circuit = "C1", SystemType type = SystemType::DistributionOverhead,
                           std::string cause = "Weather_Wind") {
    OutageRecord r;
    r.outage_id = std::move(id);
    r.circuit_id = std::move(circuit);
    r.start = epoch() + Seconds{std::llround(start_h * 3600.0)};
    r.restore = r.start + Seconds{std::llround(duration_h * 3600.0)};
    r.customers = customers;
    r.system_type = type;
    r.cause_code = std::move(cause);
    return r;
}

inline CircuitTable table3() {
    std::ifstream in(fixture_path("table3_exposures.csv"));
    if (!in) throw std::runtime_error("missing fixture table3_exposures.csv");
    return parse_circuit_table(in);
}

// Category counts of the reference utility dataset: (type, total, scheduled).
struct CategoryRow {
    SystemType type;
    std::size_t total;
    std::size_t scheduled;
};

inline std::vector<CategoryRow> table2_categories() {
    return {{SystemType::DistributionOverhead, 735, 259}, {SystemType::Substation, 28, 14},
            {SystemType::DistributionUnderground, 24, 10}, {SystemType::TransmissionOverhead, 11, 5},
            {SystemType::NotReported, 4, 0},             {SystemType::NotAnOutage, 2, 0}};
}

/// Records with exactly the category counts above, scheduled rows using
/// rotating planned-work codes.
inline std::vector<OutageRecord> table2_records() {
    const auto codes = ScheduledCodes::defaults().codes;
    const std::vector<std::string> scheduled(codes.begin(), codes.end());
    std::vector<OutageRecord> out;
    std::size_t n = 0;
    for (const auto& row : table2_categories()) {
        for (std::size_t k = 0; k < row.total; ++k, ++n) {
            out.push_back(outage(fmt::format("T{:04d}", n), 10.0 * static_cast<double>(n), 1.5, 3, "C1", row.type,
                                 k < row.scheduled ? scheduled[k % scheduled.size()] : "Vegetation_Tree Contact"));
        }
    }
    return out;
}

/// 46 well separated single-outage events over 20 years whose annual totals
/// are exactly {2.3 outages, 72.0 customers, 184.2 customer hours, 4.93
/// outage hours} and whose lower-median customer count is 2.
inline std::vector<OutageRecord> circuit1_records() {
    std::vector<std::int64_t> customers(22, 1);
    customers.insert(customers.end(), 10, 2);
    for (std::int64_t c : {3, 4, 5, 6, 8, 10, 12, 15, 20, 25, 30, 40}) customers.push_back(c);
    // the last two are solved below
    customers.push_back(600);
    customers.push_back(620);

    const std::int64_t total_seconds = std::llround(4.93 * 20.0 * 3600.0);
    const std::int64_t total_customer_seconds = std::llround(184.2 * 20.0 * 3600.0);

    // small outages follow a duration cycle scaled by a; the two large ones share d
    //   2d + a*S_small = S,  1220d + a*C_small = C
    const std::int64_t cycle[] = {60, 90, 120, 150, 180, 135};
    double s_small = 0, c_small = 0;
    for (std::size_t i = 0; i < 44; ++i) {
        s_small += static_cast<double>(cycle[i % 6] * 60);
        c_small += static_cast<double>(cycle[i % 6] * 60 * customers[i]);
    }
    const double a = (static_cast<double>(total_customer_seconds) - 610.0 * static_cast<double>(total_seconds)) /
                     (c_small - 610.0 * s_small);

    std::vector<std::int64_t> seconds;
    std::int64_t used = 0, used_cs = 0;
    for (std::size_t i = 0; i < 44; ++i) {
        seconds.push_back(std::llround(a * static_cast<double>(cycle[i % 6] * 60)));
        used += seconds.back();
        used_cs += seconds.back() * customers[i];
    }
    // 600 x + 620 y = C, x + y = S; nudge a single-customer outage so y is integral
    const std::int64_t delta = (((total_customer_seconds - used_cs) - 600 * (total_seconds - used)) % 20 + 20) % 20;
    seconds[0] += delta;
    used += delta;
    used_cs += delta;
    const std::int64_t S = total_seconds - used;
    const std::int64_t C = total_customer_seconds - used_cs;
    const std::int64_t y = (C - 600 * S) / 20;
    const std::int64_t x = S - y;
    if ((C - 600 * S) % 20 != 0 || x <= 0 || y <= 0) throw std::logic_error("circuit1 fixture infeasible");
    seconds.push_back(x);
    seconds.push_back(y);

    // interleave so the big outages are not adjacent in time
    std::vector<std::size_t> order(46);
    for (std::size_t i = 0; i < 46; ++i) order[i] = (i * 17) % 46;

    std::vector<OutageRecord> out;
    const double spacing_h = 20.0 * kDaysPerYear * 24.0 / 46.0;
    for (std::size_t slot = 0; slot < 46; ++slot) {
        const std::size_t i = order[slot];
        OutageRecord r;
        r.outage_id = fmt::format("C1-{:03d}", slot);
        r.circuit_id = "CIRCUIT1";
        r.start = epoch() + Seconds{std::llround(static_cast<double>(slot) * spacing_h * 3600.0)};
        r.restore = r.start + Seconds{seconds[i]};
        r.customers = customers[i];
        r.system_type = SystemType::DistributionOverhead;
        r.cause_code = "Weather_Wind";
        out.push_back(std::move(r));
    }
    return out;
}

inline CircuitInfo circuit1_info() {
    return CircuitInfo{"CIRCUIT1", 10.15, 0.0, 0.0, std::nullopt};
}

/// N outages; every fourth position starts a bunched group of up to three.
inline std::vector<OutageRecord> mixed_records(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::lognormal_distribution<double> dur(0.5, 0.9);
    std::discrete_distribution<int> cust_pick{40, 15, 10, 10, 8, 7, 5, 3, 2};
    const std::int64_t cust_values[] = {1, 2, 3, 5, 8, 20, 50, 150, 500};
    std::vector<OutageRecord> out;
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool bunched = (i % 4) != 0;
        t += bunched ? 0.25 : 200.0;
        out.push_back(outage(fmt::format("M{:04d}", i), t, dur(rng), cust_values[cust_pick(rng)], "MIX"));
    }
    return out;
}

/// Heavy-tail storm dataset: multi-outage bursts with largest-first restoration.
inline SynthOutput storms() {
    return generate(synth_preset("storms", 7));
}

/// Overhead durations (minutes) calibrated to median 103 and 93% mass below 400.
inline std::vector<double> calibrated_durations() {
    const auto out = generate(synth_preset("utility", 1));
    std::vector<double> minutes;
    const auto kept = filter_unscheduled_distribution(out.records);
    for (const auto& r : select_system_type(kept, SystemType::DistributionOverhead))
        minutes.push_back(r.duration_minutes());
    return minutes;
}

/// Connected components of the "starts within gap" graph, found by checking
/// every set partition of the outages. Blocks are returned as sorted id sets.
inline std::set<std::set<std::string>> brute_force_partition(const std::vector<OutageRecord>& outages, Seconds gap) {
    const std::size_t n = outages.size();
    auto close = [&](std::size_t a, std::size_t b) {
        const auto d = outages[a].start - outages[b].start;
        return (d < Seconds{0} ? -d : d) <= gap;
    };
    std::vector<std::size_t> block(n, 0);
    std::set<std::set<std::string>> found;
    std::size_t matches = 0;

    // restricted growth strings enumerate each set partition once
    std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t i, std::size_t blocks) {
        if (i == n) {
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a + 1; b < n; ++b)
                    if (close(a, b) && block[a] != block[b]) return;
            // each block must be connected through close pairs
            for (std::size_t k = 0; k < blocks; ++k) {
                std::vector<std::size_t> members;
                for (std::size_t a = 0; a < n; ++a)
                    if (block[a] == k) members.push_back(a);
                std::vector<bool> seen(members.size(), false);
                std::vector<std::size_t> stack{0};
                seen[0] = true;
                while (!stack.empty()) {
                    const auto u = stack.back();
                    stack.pop_back();
                    for (std::size_t v = 0; v < members.size(); ++v) {
                        if (!seen[v] && close(members[u], members[v])) {
                            seen[v] = true;
                            stack.push_back(v);
                        }
                    }
                }
                if (std::find(seen.begin(), seen.end(), false) != seen.end()) return;
            }
            ++matches;
            found.clear();
            for (std::size_t k = 0; k < blocks; ++k) {
                std::set<std::string> ids;
                for (std::size_t a = 0; a < n; ++a)
                    if (block[a] == k) ids.insert(outages[a].outage_id);
                found.insert(ids);
            }
            return;
        }
        for (std::size_t k = 0; k <= blocks; ++k) {
            block[i] = k;
            visit(i + 1, std::max(blocks, k + 1));
        }
    };
    if (n > 0) {
        block[0] = 0;
        visit(1, 1);
    }
    if (n > 0 && matches != 1) throw std::logic_error("partition oracle found no unique partition");
    return found;
}

inline std::set<std::set<std::string>> as_partition(const std::vector<ResilienceEvent>& events) {
    std::set<std::set<std::string>> out;
    for (const auto& e : events) {
        std::set<std::string> ids;
        for (const auto& o : e.outages) ids.insert(o.outage_id);
        out.insert(ids);
    }
    return out;
}

/// Random dataset of 1..6 outages whose consecutive start gaps straddle the
/// threshold, including exact ties and zero gaps.
inline std::vector<OutageRecord> random_small_dataset(std::mt19937_64& rng, Seconds gap) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::int64_t g = gap.count();
    std::vector<OutageRecord> out;
    std::int64_t t = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
            case 0: t += 0; break;
            case 1: t += g; break;
            case 2: t += g + 1; break;
            case 3: t += std::uniform_int_distribution<std::int64_t>(0, g)(rng); break;
            default: t += std::uniform_int_distribution<std::int64_t>(g + 1, 4 * g)(rng); break;
            }
        }
        OutageRecord r;
        r.outage_id = fmt::format("R{}", i);
        r.circuit_id = "C";
        r.start = epoch() + Seconds{t};
        r.restore = r.start + Seconds{std::uniform_int_distribution<std::int64_t>(60, 5 * g)(rng)};
        r.customers = std::uniform_int_distribution<std::int64_t>(0, 50)(rng);
        out.push_back(std::move(r));
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

} // namespace fixtures
