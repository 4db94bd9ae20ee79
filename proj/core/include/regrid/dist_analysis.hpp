#pragma once

// Gaussian kernel density estimates and summary statistics for outage
// durations and customers-affected counts.

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace regrid {

enum class Transform { Identity, Log10 };

struct BandwidthPolicy {
    enum class Kind { Silverman, Fixed };
    Kind kind = Kind::Silverman;
    double value = 0.0; // used when kind == Fixed

    static BandwidthPolicy silverman() { return {}; }
    static BandwidthPolicy fixed(double h) { return {Kind::Fixed, h}; }
};

struct GridSpec {
    std::size_t points = 1024;
    double tail_bandwidths = 4.0;
    bool clip_at_zero = false;
    std::optional<std::pair<double, double>> range; // overrides the automatic span
};

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5); sd alone when the IQR is 0.
double silverman_bandwidth(std::span<const double> samples);

class KernelDensity {
public:
    KernelDensity(std::vector<double> samples, double bandwidth);

    double operator()(double x) const;
    double bandwidth() const { return bandwidth_; }
    std::span<const double> samples() const { return samples_; }

private:
    std::vector<double> samples_;
    double bandwidth_;
};

struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
    Transform transform = Transform::Identity;

    double integral() const; // trapezoidal
    double mode() const;     // grid argmax
};

/// Evaluates a Gaussian KDE on a uniform grid. Throws DataError for fewer than
/// two samples (unless a fixed bandwidth is given) or zero variance.
DensityCurve kde(std::span<const double> samples, BandwidthPolicy bandwidth = {}, const GridSpec& grid = {});

struct SampleStats {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0; // lower median
    double mode = 0.0;
    std::optional<double> skewness; // adjusted Fisher-Pearson, needs n >= 3
};

/// Adjusted Fisher-Pearson coefficient G1; nullopt for n < 3 or zero variance.
std::optional<double> skewness(std::span<const double> samples);

SampleStats summarize(std::span<const double> samples, const DensityCurve& curve);

/// Fraction of samples <= x.
double tail_probability(std::span<const double> samples, double x);

/// KDEs of log10(a) and log10(b) on one shared grid.
std::pair<DensityCurve, DensityCurve> log_density_pair(std::span<const double> samples_a,
                                                       std::span<const double> samples_b,
                                                       BandwidthPolicy bandwidth = {}, std::size_t points = 1024);

void write_density_csv(std::ostream& out, const DensityCurve& curve);

void to_json(nlohmann::json& j, const SampleStats& s);

} // namespace regrid
