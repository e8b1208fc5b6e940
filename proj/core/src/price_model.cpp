#include "hsadp/price_model.hpp"

#include <algorithm>
#include <string>

#include "hsadp/errors.hpp"

namespace hsadp {

SeasonalDecomposition seasonal_decompose(std::span<const double> prices, int period, int first_slot) {
    if (period < 1) throw InputError("period must be >= 1");
    if (prices.empty()) throw InputError("cannot decompose an empty price series");
    std::vector<KahanSum> sums(period);
    std::vector<int> counts(period, 0);
    KahanSum all;
    for (std::size_t t = 0; t < prices.size(); ++t) {
        const int slot = static_cast<int>((first_slot + t) % period);
        sums[slot].add(prices[t]);
        ++counts[slot];
        all.add(prices[t]);
    }
    const double overall = all.value() / static_cast<double>(prices.size());
    SeasonalDecomposition out;
    out.seasonal.resize(period);
    for (int g = 0; g < period; ++g) out.seasonal[g] = counts[g] > 0 ? sums[g].value() / counts[g] : overall;
    KahanSum residual;
    for (std::size_t t = 0; t < prices.size(); ++t)
        residual.add(prices[t] - out.seasonal[(first_slot + t) % period]);
    out.mean_level = residual.value() / static_cast<double>(prices.size());
    out.reference.resize(prices.size());
    for (std::size_t t = 0; t < prices.size(); ++t)
        out.reference[t] = out.mean_level + out.seasonal[(first_slot + t) % period];
    return out;
}

std::vector<double> centered_moving_average(std::span<const double> values, int window) {
    const int n = static_cast<int>(values.size());
    const int before = window / 2;
    const int after = window - before - 1;
    std::vector<double> prefix(n + 1, 0.0);
    for (int t = 0; t < n; ++t) prefix[t + 1] = prefix[t] + values[t];
    std::vector<double> out(n);
    for (int t = 0; t < n; ++t) {
        int lo = t - before;
        int hi = t + after;
        if (lo < 0 || hi > n - 1) {
            const int k = std::min(t, n - 1 - t);
            lo = t - k;
            hi = t + k;
        }
        out[t] = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
    }
    return out;
}

std::vector<int> TemperatureFeatures::conditions() const {
    std::vector<int> out(ys.size());
    for (std::size_t t = 0; t < ys.size(); ++t) out[t] = condition(t);
    return out;
}

TemperatureFeatures temperature_features(std::span<const double> temperature, std::optional<double> seasonal_max,
                                         std::optional<double> trend_max) {
    if (static_cast<int>(temperature.size()) <= kTrendWindow)
        throw InputError("temperature series must be longer than " + std::to_string(kTrendWindow) + " points");
    TemperatureFeatures out;
    out.trend = centered_moving_average(temperature, kTrendWindow);
    out.seasonal.resize(temperature.size());
    for (std::size_t t = 0; t < temperature.size(); ++t) out.seasonal[t] = temperature[t] - out.trend[t];
    out.seasonal_max = seasonal_max.value_or(*std::max_element(out.seasonal.begin(), out.seasonal.end()));
    out.trend_max = trend_max.value_or(*std::max_element(out.trend.begin(), out.trend.end()));
    out.ys.resize(temperature.size());
    out.ytr.resize(temperature.size());
    for (std::size_t t = 0; t < temperature.size(); ++t) {
        const double hs = out.seasonal[t];
        out.ys[t] = (out.seasonal_max > 0.0 && hs >= 0.75 * out.seasonal_max) ? 2 : 1;
        const double htr = out.trend[t];
        if (htr >= 0.8 * out.trend_max)
            out.ytr[t] = 3;
        else if (htr >= 0.3 * out.trend_max)
            out.ytr[t] = 2;
        else
            out.ytr[t] = 1;
    }
    return out;
}

CrossingStateModel fit_price_model(const TrainingSeries& series, const ModelHyperparams& hyper) {
    series.validate();
    const SeasonalDecomposition dec = seasonal_decompose(series.actual, kStepsPerDay, series.first_slot());
    const std::vector<double> errors = compute_errors(series.actual, dec.reference);
    PriceModelExtras extras;
    extras.period = kStepsPerDay;
    extras.seasonal = dec.seasonal;
    extras.mean_level = dec.mean_level;
    CrossingStateModel model;
    if (series.has_temperature()) {
        const TemperatureFeatures feats = temperature_features(series.temperature);
        extras.seasonal_max = feats.seasonal_max;
        extras.trend_max = feats.trend_max;
        model = fit_crossing_model(errors, hyper, feats.conditions(), kTemperatureConditions);
    } else {
        model = fit_crossing_model(errors, hyper);
    }
    model.price = std::move(extras);
    return model;
}

std::vector<double> price_errors(const CrossingStateModel& model, const TrainingSeries& series) {
    if (!model.price) throw InputError("model carries no price reference");
    const int first = series.first_slot();
    std::vector<double> out(series.size());
    for (std::size_t t = 0; t < series.size(); ++t)
        out[t] = series.actual[t] - model.price->reference(static_cast<int>((first + t) % model.price->period));
    return out;
}

std::vector<int> price_conditions(const CrossingStateModel& model, std::span<const double> temperature) {
    if (model.num_conditions == 1 || !model.price) return std::vector<int>(temperature.size(), 0);
    return temperature_features(temperature, model.price->seasonal_max, model.price->trend_max).conditions();
}

}  // namespace hsadp
