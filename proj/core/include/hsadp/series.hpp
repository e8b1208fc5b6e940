#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hsadp {

/// Five-minute cadence used throughout.
inline constexpr std::int64_t kStepSeconds = 300;
inline constexpr int kStepsPerDay = 288;
inline constexpr double kStepsPerHour = 12.0;

/// Observed process and its reference series (forecast for wind, periodic
/// reference for price). Timestamps are Unix seconds, UTC.
struct TrainingSeries {
    std::vector<std::int64_t> timestamps;
    std::vector<double> actual;
    std::vector<double> reference;
    std::vector<double> temperature;  ///< empty unless the CSV carried one

    [[nodiscard]] std::size_t size() const { return actual.size(); }
    [[nodiscard]] bool has_temperature() const { return !temperature.empty(); }
    /// Time-of-day slot of the first sample (0..287).
    [[nodiscard]] int first_slot() const;
    /// Throws InputError on length mismatch, fewer than 2 points, or a non-uniform grid.
    void validate() const;
};

/// actual - reference, element-wise.
[[nodiscard]] std::vector<double> compute_errors(const TrainingSeries& series);
[[nodiscard]] std::vector<double> compute_errors(std::span<const double> actual,
                                                 std::span<const double> reference);

}  // namespace hsadp
