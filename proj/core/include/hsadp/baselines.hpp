#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hsadp/crossings.hpp"
#include "hsadp/grid.hpp"

namespace hsadp {

/// e_t = gamma e_{t-1} + N(0, resid_std^2)
struct Ar1Params {
    double gamma = 0.0;
    double resid_std = 0.0;

    void validate() const;
    friend bool operator==(const Ar1Params&, const Ar1Params&) = default;
};

/// e_t = gamma e_{t-1} + N(0, base_std^2) + 1{U < jump_prob} N(0, jump_std^2)
struct MrjdParams {
    double gamma = 0.0;
    double base_std = 0.0;
    double jump_std = 0.0;
    double jump_prob = 0.0;

    void validate() const;
    friend bool operator==(const MrjdParams&, const MrjdParams&) = default;
};

/// First-order chain on the value grid keyed by the quantile bin of the previous error.
struct MarkovChainParams {
    ValueGrid grid;
    QuantileBins bins;
    std::vector<Pmf> successor;  ///< one PMF per bin
    Pmf marginal;

    friend bool operator==(const MarkovChainParams&, const MarkovChainParams&) = default;
};

/// Least squares through the origin; residual std with N-1 pairs.
[[nodiscard]] Ar1Params fit_ar1(std::span<const double> errors);

/// Starts at `initial` (snapped when a grid is given); every later value is
/// gamma * previous + noise, snapped to the grid when given.
[[nodiscard]] std::vector<double> sample_ar1(const Ar1Params& params, int horizon, std::uint64_t seed,
                                             double initial, const std::optional<ValueGrid>& grid = std::nullopt,
                                             std::uint64_t stream = 0);

/// AR fit, then residual jumps split off at three robust standard deviations.
[[nodiscard]] MrjdParams fit_mrjd(std::span<const double> errors);

/// Base noise uses the same stream as sample_ar1, so jump_prob = 0 reproduces the AR(1) path.
[[nodiscard]] std::vector<double> sample_mrjd(const MrjdParams& params, int horizon, std::uint64_t seed,
                                              double initial, const std::optional<ValueGrid>& grid = std::nullopt,
                                              std::uint64_t stream = 0);

[[nodiscard]] MarkovChainParams fit_markov_chain(std::span<const double> errors, int bins, const ValueGrid& grid);

[[nodiscard]] std::vector<double> sample_markov_chain(const MarkovChainParams& params, int horizon,
                                                      std::uint64_t seed, double initial, std::uint64_t stream = 0);

}  // namespace hsadp
