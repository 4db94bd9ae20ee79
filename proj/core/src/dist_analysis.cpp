#include "regrid/dist_analysis.hpp"

#include "regrid/error.hpp"
#include "regrid/ug_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace regrid {
namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile7(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

bool constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double resolve_bandwidth(std::span<const double> samples, BandwidthPolicy policy) {
    if (policy.kind == BandwidthPolicy::Kind::Fixed) {
        if (!(policy.value > 0.0)) throw ConfigError("fixed bandwidth must be positive");
        if (samples.size() >= 2 && constant(samples)) throw DataError("zero variance");
        return policy.value;
    }
    if (samples.size() < 2) throw DataError("kernel density needs at least two samples");
    if (constant(samples)) throw DataError("zero variance");
    return silverman_bandwidth(samples);
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
    std::vector<double> grid(points);
    const double step = points > 1 ? (hi - lo) / static_cast<double>(points - 1) : 0.0;
    for (std::size_t i = 0; i < points; ++i) grid[i] = lo + step * static_cast<double>(i);
    return grid;
}

DensityCurve evaluate(const KernelDensity& density, std::vector<double> grid, Transform transform) {
    DensityCurve curve;
    curve.bandwidth = density.bandwidth();
    curve.transform = transform;
    curve.density.reserve(grid.size());
    for (double x : grid) curve.density.push_back(density(x));
    curve.grid = std::move(grid);
    return curve;
}

} // namespace

double silverman_bandwidth(std::span<const double> samples) {
    if (samples.size() < 2) throw DataError("bandwidth needs at least two samples");
    const double sd = sample_sd(samples);
    std::vector<double> v(samples.begin(), samples.end());
    const double iqr = quantile7(v, 0.75) - quantile7(v, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    if (!(spread > 0.0)) throw DataError("zero variance");
    return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

KernelDensity::KernelDensity(std::vector<double> samples, double bandwidth)
    : samples_(std::move(samples)), bandwidth_(bandwidth) {
    if (samples_.empty()) throw DataError("kernel density of empty sample");
    if (!(bandwidth_ > 0.0)) throw ConfigError("bandwidth must be positive");
}

double KernelDensity::operator()(double x) const {
    const double inv_h = 1.0 / bandwidth_;
    double sum = 0.0;
    for (double s : samples_) {
        const double z = (x - s) * inv_h;
        sum += std::exp(-0.5 * z * z);
    }
    return sum * inv_h / (static_cast<double>(samples_.size()) * std::sqrt(2.0 * std::numbers::pi));
}

double DensityCurve::integral() const {
    double area = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        area += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
    return area;
}

double DensityCurve::mode() const {
    if (grid.empty()) throw DataError("mode of empty density curve");
    const auto it = std::max_element(density.begin(), density.end());
    return grid[static_cast<std::size_t>(it - density.begin())];
}

DensityCurve kde(std::span<const double> samples, BandwidthPolicy bandwidth, const GridSpec& grid) {
    if (samples.empty()) throw DataError("kernel density of empty sample");
    if (grid.points < 2) throw ConfigError("density grid needs at least two points");
    const double h = resolve_bandwidth(samples, bandwidth);
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    double lo = *mn - grid.tail_bandwidths * h;
    double hi = *mx + grid.tail_bandwidths * h;
    if (grid.range) std::tie(lo, hi) = *grid.range;
    if (grid.clip_at_zero) lo = std::max(lo, 0.0);
    KernelDensity density(std::vector<double>(samples.begin(), samples.end()), h);
    return evaluate(density, uniform_grid(lo, hi, grid.points), Transform::Identity);
}

std::optional<double> skewness(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 3) return std::nullopt;
    const double m = mean_of(samples);
    double m2 = 0.0, m3 = 0.0;
    for (double x : samples) {
        const double d = x - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    if (!(m2 > 0.0)) return std::nullopt;
    const double g1 = m3 / std::pow(m2, 1.5);
    const double nd = static_cast<double>(n);
    return g1 * std::sqrt(nd * (nd - 1.0)) / (nd - 2.0);
}

SampleStats summarize(std::span<const double> samples, const DensityCurve& curve) {
    if (samples.empty()) throw DataError("summary of empty sample");
    SampleStats s;
    s.n = samples.size();
    s.mean = mean_of(samples);
    s.median = lower_median(samples);
    s.mode = curve.mode();
    s.skewness = skewness(samples);
    return s;
}

double tail_probability(std::span<const double> samples, double x) {
    if (samples.empty()) throw DataError("tail probability of empty sample");
    const auto below = std::count_if(samples.begin(), samples.end(), [&](double s) { return s <= x; });
    return static_cast<double>(below) / static_cast<double>(samples.size());
}

std::pair<DensityCurve, DensityCurve> log_density_pair(std::span<const double> samples_a,
                                                       std::span<const double> samples_b, BandwidthPolicy bandwidth,
                                                       std::size_t points) {
    auto to_log = [](std::span<const double> v) {
        std::vector<double> out;
        out.reserve(v.size());
        for (double x : v) {
            if (!(x > 0.0)) throw DataError(fmt::format("log density needs positive samples, got {}", x));
            out.push_back(std::log10(x));
        }
        return out;
    };
    auto la = to_log(samples_a);
    auto lb = to_log(samples_b);
    const double ha = resolve_bandwidth(la, bandwidth);
    const double hb = resolve_bandwidth(lb, bandwidth);
    const double pad = 4.0 * std::max(ha, hb);
    const double lo = std::min(*std::min_element(la.begin(), la.end()), *std::min_element(lb.begin(), lb.end())) - pad;
    const double hi = std::max(*std::max_element(la.begin(), la.end()), *std::max_element(lb.begin(), lb.end())) + pad;
    const auto grid = uniform_grid(lo, hi, std::max<std::size_t>(points, 2));
    return {evaluate(KernelDensity(std::move(la), ha), grid, Transform::Log10),
            evaluate(KernelDensity(std::move(lb), hb), grid, Transform::Log10)};
}

void write_density_csv(std::ostream& out, const DensityCurve& curve) {
    out << (curve.transform == Transform::Log10 ? "log10_value" : "value") << ",density\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        out << fmt::format("{},{}\n", curve.grid[i], curve.density[i]);
}

void to_json(nlohmann::json& j, const SampleStats& s) {
    j = nlohmann::json{{"n", s.n}, {"mean", s.mean}, {"median", s.median}, {"mode", s.mode}};
    if (s.skewness) j["skewness"] = *s.skewness;
}

} // namespace regrid
