#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "hsadp/errors.hpp"
#include "hsadp/price_model.hpp"

using namespace hsadp;
using namespace hsadp::fixtures;

namespace {

std::vector<double> slow_moving_average(const std::vector<double>& v, int window) {
    const int n = static_cast<int>(v.size());
    std::vector<double> out(n);
    for (int t = 0; t < n; ++t) {
        int lo = t - window / 2;
        int hi = t + (window - window / 2 - 1);
        if (lo < 0 || hi >= n) {
            const int k = std::min(t, n - 1 - t);
            lo = t - k;
            hi = t + k;
        }
        double s = 0.0;
        for (int k = lo; k <= hi; ++k) s += v[k];
        out[t] = s / (hi - lo + 1);
    }
    return out;
}

}  // namespace

TEST_CASE("seasonal decomposition averages each slot") {
    std::vector<double> p;
    for (int d = 0; d < 3; ++d)
        for (int s = 0; s < 4; ++s) p.push_back(10.0 * s + d);
    const SeasonalDecomposition dec = seasonal_decompose(p, 4);
    CHECK(dec.seasonal == std::vector<double>{1.0, 11.0, 21.0, 31.0});
    CHECK(dec.mean_level == doctest::Approx(0.0));
    for (std::size_t t = 0; t < p.size(); ++t) CHECK(dec.reference[t] == doctest::Approx(dec.seasonal[t % 4]));

    const SeasonalDecomposition shifted = seasonal_decompose(p, 4, 2);
    CHECK(shifted.seasonal[2] == doctest::Approx(1.0));
    CHECK(shifted.seasonal[1] == doctest::Approx(31.0));

    const std::vector<double> partial{5.0, 7.0};
    const SeasonalDecomposition sparse = seasonal_decompose(partial, 4);
    CHECK(sparse.seasonal[3] == doctest::Approx(6.0));
    CHECK_THROWS_AS((void)seasonal_decompose(std::vector<double>{}, 4), InputError);
}

TEST_CASE("centered moving average shrinks symmetrically at the ends") {
    std::vector<double> v(137);
    for (std::size_t t = 0; t < v.size(); ++t) v[t] = std::sin(0.1 * t) + 0.01 * t * t;
    for (int w : {5, 50}) {
        const auto got = centered_moving_average(v, w);
        const auto want = slow_moving_average(v, w);
        for (std::size_t t = 0; t < v.size(); ++t) CHECK(got[t] == doctest::Approx(want[t]));
    }
    const auto first = centered_moving_average(v, 50);
    CHECK(first[0] == doctest::Approx(v[0]));
    CHECK(first.back() == doctest::Approx(v.back()));
}

TEST_CASE("temperature labels follow the thresholds") {
    std::vector<double> temp(2000);
    for (std::size_t t = 0; t < temp.size(); ++t)
        temp[t] = 60.0 + 15.0 * std::sin(2.0 * std::numbers::pi * t / 1500.0) + 8.0 * std::sin(2.0 * std::numbers::pi * t / 288.0);
    const TemperatureFeatures f = temperature_features(temp);
    const auto trend = slow_moving_average(temp, kTrendWindow);
    for (std::size_t t = 0; t < temp.size(); ++t) {
        CHECK(f.trend[t] == doctest::Approx(trend[t]));
        const double hs = temp[t] - trend[t];
        CHECK(f.ys[t] == (hs >= 0.75 * f.seasonal_max ? 2 : 1));
        const int ytr = trend[t] >= 0.8 * f.trend_max ? 3 : trend[t] >= 0.3 * f.trend_max ? 2 : 1;
        CHECK(f.ytr[t] == ytr);
        CHECK(f.condition(t) == (f.ys[t] - 1) * 3 + (f.ytr[t] - 1));
    }
    const auto c = f.conditions();
    CHECK(*std::max_element(c.begin(), c.end()) < kTemperatureConditions);
    const TemperatureFeatures g = temperature_features(temp, 1000.0, 1000.0);
    for (std::size_t t = 0; t < temp.size(); ++t) CHECK(g.condition(t) == 0);
    CHECK_THROWS_AS((void)temperature_features(std::vector<double>(50, 1.0)), InputError);
}

TEST_CASE("price model fit stores the seasonal reference") {
    SyntheticSpec spec;
    spec.days = 20;
    spec.seed = 3;
    const SyntheticData data = generate_synthetic(spec);
    const CrossingStateModel m = fit_price_model(data.price, ModelHyperparams{1, 4, ValueGrid{-40.0, 140.0, 2.0}});
    REQUIRE(m.price.has_value());
    CHECK(m.num_conditions == kTemperatureConditions);
    CHECK(m.price->seasonal.size() == static_cast<std::size_t>(kStepsPerDay));
    const auto errors = price_errors(m, data.price);
    const auto dec = seasonal_decompose(data.price.actual, kStepsPerDay, data.price.first_slot());
    for (std::size_t t = 0; t < errors.size(); t += 97)
        CHECK(errors[t] == doctest::Approx(data.price.actual[t] - dec.reference[t]));
    const auto cond = price_conditions(m, data.price.temperature);
    const auto direct = temperature_features(data.price.temperature).conditions();
    CHECK(cond == direct);

    CrossingStateModel plain = filter_toy_model();
    CHECK_THROWS_AS((void)price_errors(plain, data.price), InputError);
    CHECK(price_conditions(plain, data.price.temperature) == std::vector<int>(data.price.size(), 0));
}
