#include "hsadp/crossings.hpp"

#include <algorithm>
#include <cmath>

#include "hsadp/errors.hpp"

namespace hsadp {

Crossings extract_crossings(std::span<const double> errors) {
    Crossings out;
    if (errors.empty()) return out;
    int start = 0;
    int sign = crossing_sign(errors[0]);
    for (int t = 1; t < static_cast<int>(errors.size()); ++t) {
        const int s = crossing_sign(errors[t]);
        if (s == sign) continue;
        out.segments.push_back({sign, start, t - start});
        (s == 1 ? out.up : out.down).push_back(t);
        start = t;
        sign = s;
    }
    out.segments.push_back({sign, start, static_cast<int>(errors.size()) - start});
    return out;
}

int QuantileBins::bin_of(double v) const {
    return static_cast<int>(std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
}

QuantileBins quantile_bins(std::span<const double> samples, int bins) {
    if (bins < 1) throw InputError("bin count must be >= 1");
    if (samples.empty()) throw TrainingError("cannot quantize an empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<long long>(sorted.size());
    QuantileBins out;
    out.edges.reserve(bins - 1);
    for (int b = 1; b < bins; ++b) {
        // smallest k with k/n >= b/bins; edge is the k-th order statistic (1-based)
        const long long k = (static_cast<long long>(b) * n + bins - 1) / bins;
        out.edges.push_back(sorted[std::max<long long>(k, 1) - 1]);
    }
    return out;
}

double DurationCdf::at(int d) const {
    if (d <= 0) return cdf.empty() ? 0.0 : cdf[0];
    if (d >= max_duration()) return 1.0;
    return cdf[d];
}

double DurationCdf::switch_probability(int tau) const {
    const double here = at(tau);
    if (here >= 1.0) return 1.0;
    const double next = at(tau + 1);
    return std::clamp((next - here) / (1.0 - here), 0.0, 1.0);
}

DurationCdf empirical_duration_cdf(std::span<const int> durations) {
    DurationCdf out;
    if (durations.empty()) return out;
    int max_d = 0;
    for (int d : durations) {
        if (d < 1) throw InputError("durations must be positive");
        max_d = std::max(max_d, d);
    }
    std::vector<double> counts(max_d + 1, 0.0);
    for (int d : durations) counts[d] += 1.0;
    out.cdf.assign(max_d + 1, 0.0);
    double running = 0.0;
    const double n = static_cast<double>(durations.size());
    for (int d = 1; d <= max_d; ++d) {
        running += counts[d];
        out.cdf[d] = running / n;
    }
    out.cdf[max_d] = 1.0;
    out.empty = false;
    return out;
}

DurationBinning quantize_durations(std::span<const int> durations, int m) {
    if (durations.empty()) throw TrainingError("no complete crossing durations to quantize");
    std::vector<double> as_double(durations.begin(), durations.end());
    DurationBinning out;
    out.bins = quantile_bins(as_double, m);
    std::vector<std::vector<int>> per_bin(m);
    for (int d : durations) per_bin[out.bins.bin_of(d)].push_back(d);
    out.cdfs.reserve(m);
    for (const auto& members : per_bin) out.cdfs.push_back(empirical_duration_cdf(members));
    return out;
}

CrossingTimeCdfs crossing_time_cdf(std::span<const double> path) {
    CrossingTimeCdfs out;
    const Crossings c = extract_crossings(path);
    for (std::size_t k = 0; k + 1 < c.segments.size(); ++k) {
        const Segment& s = c.segments[k];
        (s.sign == 1 ? out.up_durations : out.down_durations).push_back(s.duration);
    }
    out.up = empirical_duration_cdf(out.up_durations);
    out.down = empirical_duration_cdf(out.down_durations);
    return out;
}

double ks_statistic(const DurationCdf& a, const DurationCdf& b) {
    const int top = std::max(a.max_duration(), b.max_duration());
    double worst = 0.0;
    for (int d = 0; d <= top; ++d) worst = std::max(worst, std::abs(a.at(d) - b.at(d)));
    return worst;
}

}  // namespace hsadp
