#pragma once

// Typical underground outage statistics: the pooled annual outage rate per
// mile, the mean outage duration and the typical number of customers.

#include "regrid/outage_store.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace regrid {

struct CircuitUgExposure {
    std::string circuit_id;
    double total_miles = 0.0;
    double underground_miles = 0.0;
    double ug_years = 0.0;
    std::size_t ug_outage_count = 0;

    bool has_exposure() const { return underground_miles > 0.0 && ug_years > 0.0; }
    double mile_years() const { return underground_miles * ug_years; }
};

/// outages / (miles * years). Throws DataError("no exposure") when either is zero.
double circuit_ug_rate(const CircuitUgExposure& exposure);

enum class OutlierRule {
    Grubbs,      // two-sided Grubbs test on the largest rate, single pass
    TukeyFence,  // rate > Q3 + k * IQR
    None,
};

struct OutlierPolicy {
    OutlierRule rule = OutlierRule::Grubbs;
    double significance = 0.05;
    double fence_multiplier = 3.0;
};

struct CircuitRate {
    std::string circuit_id;
    double raw_rate = 0.0;
    double rate = 0.0; // after outlier replacement
    bool outlier = false;
};

struct PooledRate {
    double lambda_ug = 0.0;
    std::vector<CircuitRate> circuits; // circuits with exposure, input order
    std::size_t excluded_no_exposure = 0;
};

/// Unweighted mean of per-circuit rates after replacing flagged outliers with
/// the mean of the remaining rates.
PooledRate pooled_ug_rate(std::span<const CircuitUgExposure> exposures, const OutlierPolicy& policy = {});

/// Grubbs critical value G for n observations, two-sided at `alpha`.
double grubbs_critical_value(std::size_t n, double alpha);

/// Indices of `values` flagged by the rule. Values are not reordered.
std::vector<std::size_t> flag_outliers(std::span<const double> values, const OutlierPolicy& policy);

double ug_duration_mean(std::span<const double> durations_hours);

enum class CustomerStatistic { Median, Mean };

/// Lower median: the order statistic at position ceil(n/2).
double lower_median(std::span<const double> values);

double typical_customers(std::span<const OutageRecord> records, CustomerStatistic statistic);

struct UgStats {
    double lambda_ug = 0.0;          // outages / mile / year
    double mean_duration = 0.0;      // hours
    double mean_customers = 0.0;
    double median_customers = 0.0;

    double customers(CustomerStatistic s) const {
        return s == CustomerStatistic::Median ? median_customers : mean_customers;
    }
};

void to_json(nlohmann::json& j, const UgStats& s);
void to_json(nlohmann::json& j, const PooledRate& p);

/// Circuit table CSV: circuit,total_miles,underground_miles,ug_outages,ug_years
/// with optional customers_served and annual_rate columns.
struct CircuitTable {
    std::vector<CircuitInfo> circuits;
    std::vector<CircuitUgExposure> exposures;
};

CircuitTable parse_circuit_table(std::istream& in);
void write_circuit_table(std::ostream& out, const CircuitTable& table);

} // namespace regrid
