#pragma once

#include <span>
#include <vector>

namespace hsadp {

/// Sign regime of an error: 1 above the reference, 0 at or below it.
[[nodiscard]] inline int crossing_sign(double error) { return error > 0.0 ? 1 : 0; }

/// Maximal run of constant sign.
struct Segment {
    int sign = 0;
    int start = 0;
    int duration = 0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct Crossings {
    std::vector<Segment> segments;  ///< partition of the series, in order
    std::vector<int> up;            ///< indices t with e[t-1] <= 0 < e[t]
    std::vector<int> down;          ///< indices t with e[t-1] > 0 >= e[t]
};

[[nodiscard]] Crossings extract_crossings(std::span<const double> errors);

/// Quantile split of a sample into `bins` groups. Bin b covers values v with
/// q_b <= F(v-) < q_{b+1}, where F(v-) is the fraction of samples strictly
/// below v; bins are stored as upper-inclusive edges so bin_of(v) counts edges
/// strictly below v.
struct QuantileBins {
    std::vector<double> edges;  ///< bins()-1 nondecreasing thresholds

    [[nodiscard]] int bins() const { return static_cast<int>(edges.size()) + 1; }
    [[nodiscard]] int bin_of(double v) const;

    friend bool operator==(const QuantileBins&, const QuantileBins&) = default;
};

/// Throws TrainingError when `samples` is empty.
[[nodiscard]] QuantileBins quantile_bins(std::span<const double> samples, int bins);

/// Empirical CDF over positive integer durations. cdf[d] = P(D <= d) for
/// d = 0..max_duration(); beyond that the CDF is 1.
struct DurationCdf {
    std::vector<double> cdf{0.0, 1.0};
    bool empty = true;  ///< built from no samples (placeholder, degenerate at 1)

    [[nodiscard]] int max_duration() const { return static_cast<int>(cdf.size()) - 1; }
    [[nodiscard]] double at(int d) const;
    /// Probability that a run currently at running time tau (0 on entry) ends
    /// after this step: P(D = tau+1 | D > tau). Equals 1 once the support is exhausted.
    [[nodiscard]] double switch_probability(int tau) const;

    friend bool operator==(const DurationCdf&, const DurationCdf&) = default;
};

[[nodiscard]] DurationCdf empirical_duration_cdf(std::span<const int> durations);

/// Duration quantization into m bins plus the per-bin sojourn CDFs.
struct DurationBinning {
    QuantileBins bins;
    std::vector<DurationCdf> cdfs;  ///< one per bin; empty bins keep empty=true
};

[[nodiscard]] DurationBinning quantize_durations(std::span<const int> durations, int m);

/// Up/down crossing-time distributions of a path. Every segment except the
/// last (still running) counts as closed.
struct CrossingTimeCdfs {
    std::vector<int> up_durations;
    std::vector<int> down_durations;
    DurationCdf up;
    DurationCdf down;
};

[[nodiscard]] CrossingTimeCdfs crossing_time_cdf(std::span<const double> path);

/// Two-sample Kolmogorov-Smirnov distance between duration CDFs.
[[nodiscard]] double ks_statistic(const DurationCdf& a, const DurationCdf& b);

}  // namespace hsadp
