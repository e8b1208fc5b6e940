#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hsadp/crossing_model.hpp"
#include "hsadp/series.hpp"

namespace hsadp {

inline constexpr int kTemperatureConditions = 6;
inline constexpr int kTrendWindow = 50;

struct SeasonalDecomposition {
    std::vector<double> seasonal;   ///< per time-of-day slot
    double mean_level = 0.0;        ///< mean of price minus seasonal
    std::vector<double> reference;  ///< mean_level + seasonal at each t
};

/// Slot-wise means over a series whose first sample sits at slot `first_slot`.
/// Slots never observed take the overall mean.
[[nodiscard]] SeasonalDecomposition seasonal_decompose(std::span<const double> prices, int period = kStepsPerDay,
                                                       int first_slot = 0);

struct TemperatureFeatures {
    std::vector<int> ys;   ///< 1 or 2
    std::vector<int> ytr;  ///< 1, 2 or 3
    std::vector<double> trend;
    std::vector<double> seasonal;
    double seasonal_max = 0.0;
    double trend_max = 0.0;

    /// Joint class in [0, 6): (ys-1)*3 + (ytr-1).
    [[nodiscard]] int condition(std::size_t t) const { return (ys[t] - 1) * 3 + (ytr[t] - 1); }
    [[nodiscard]] std::vector<int> conditions() const;
};

/// Centered length-50 moving-average trend (window shrinks symmetrically at the
/// ends), seasonal = series - trend, thresholded into peak and day-type labels.
/// Thresholds use the supplied maxima when given, else the series' own.
[[nodiscard]] TemperatureFeatures temperature_features(std::span<const double> temperature,
                                                       std::optional<double> seasonal_max = std::nullopt,
                                                       std::optional<double> trend_max = std::nullopt);

[[nodiscard]] std::vector<double> centered_moving_average(std::span<const double> values, int window);

/// Seasonal reference, price errors against it, temperature conditioning when
/// the series carries temperature, then the crossing-state fit.
[[nodiscard]] CrossingStateModel fit_price_model(const TrainingSeries& series, const ModelHyperparams& hyper);

/// Price errors of `series` against the seasonal reference stored in `model`.
[[nodiscard]] std::vector<double> price_errors(const CrossingStateModel& model, const TrainingSeries& series);

/// Temperature condition labels of a series under the model's training maxima
/// (all zeros for a model without temperature conditioning).
[[nodiscard]] std::vector<int> price_conditions(const CrossingStateModel& model, std::span<const double> temperature);

}  // namespace hsadp
