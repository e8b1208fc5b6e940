#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hsadp/crossings.hpp"
#include "hsadp/grid.hpp"

namespace hsadp {

struct ModelHyperparams {
    int m = 1;  ///< duration bins per sign
    int n = 1;  ///< error bins per crossing state
    ValueGrid grid;

    void validate() const;
    friend bool operator==(const ModelHyperparams&, const ModelHyperparams&) = default;
};

/// Seasonal reference and temperature thresholds carried by price models.
struct PriceModelExtras {
    int period = 288;
    std::vector<double> seasonal;  ///< mean price per time-of-day slot
    double mean_level = 0.0;       ///< mean of the deseasonalized price
    double seasonal_max = 0.0;     ///< max seasonal temperature component in training
    double trend_max = 0.0;        ///< max temperature trend in training

    /// Reference f^P at time-of-day slot `slot`.
    [[nodiscard]] double reference(int slot) const { return mean_level + seasonal[slot % period]; }
    friend bool operator==(const PriceModelExtras&, const PriceModelExtras&) = default;
};

struct TrainingDiagnostics {
    std::vector<int> flagged_switch_rows;   ///< states never seen switching
    std::vector<int> flagged_compact_rows;  ///< states never seen at all
    std::vector<int> empty_duration_bins;   ///< states whose sojourn CDF fell back to the sign level
    int stay_fallbacks = 0;                 ///< (condition, state, bin) cells filled by fallback
    int entry_fallbacks = 0;
    int closed_segments = 0;

    friend bool operator==(const TrainingDiagnostics&, const TrainingDiagnostics&) = default;
};

using Matrix = std::vector<std::vector<double>>;

/// Crossing-state hidden semi-Markov model of an error process. States are
/// indexed sign * m + bin.
struct CrossingStateModel {
    ModelHyperparams hyper;
    int num_conditions = 1;
    std::array<QuantileBins, 2> duration_bins;  ///< per sign
    std::vector<DurationCdf> sojourn;           ///< per state
    std::vector<QuantileBins> error_bins;       ///< per state, n bins each
    Matrix switch_matrix;                       ///< P(i'|i), zero diagonal
    Matrix compact_matrix;                      ///< Markov approximation, self-transitions allowed
    std::vector<std::vector<std::vector<Pmf>>> stay;  ///< [condition][state][error bin]
    std::vector<std::vector<Pmf>> entry;              ///< [condition][state]
    std::vector<double> state_occupancy;              ///< training frequency of each state
    TrainingDiagnostics diagnostics;
    std::optional<PriceModelExtras> price;

    [[nodiscard]] int m() const { return hyper.m; }
    [[nodiscard]] int n() const { return hyper.n; }
    [[nodiscard]] const ValueGrid& grid() const { return hyper.grid; }
    [[nodiscard]] int num_states() const { return 2 * hyper.m; }
    [[nodiscard]] int state_index(int sign, int bin) const { return sign * hyper.m + bin; }
    [[nodiscard]] int sign_of_state(int state) const { return state / hyper.m; }
    [[nodiscard]] int bin_of_state(int state) const { return state % hyper.m; }
    /// State-relative error bin of `error`.
    [[nodiscard]] int error_bin(int state, double error) const { return error_bins[state].bin_of(error); }
    /// Duration bin a completed run of `duration` periods with sign `sign` belongs to.
    [[nodiscard]] int duration_bin(int sign, int duration) const {
        return duration_bins[sign].bin_of(duration);
    }
    [[nodiscard]] double switch_probability(int state, int tau) const {
        return sojourn[state].switch_probability(tau);
    }
    /// Throws ContractViolation if any stored invariant fails.
    void check_invariants() const;

    friend bool operator==(const CrossingStateModel&, const CrossingStateModel&) = default;
};

/// Per-time crossing-state labels; -1 marks the final (still running) segment.
[[nodiscard]] std::vector<int> label_crossing_states(const Crossings& crossings,
                                                     const std::array<QuantileBins, 2>& duration_bins,
                                                     int m);

struct MatrixFit {
    Matrix matrix;
    std::vector<int> flagged_rows;
};

/// Eq.-style count ratio over switch points only. Rows of states never seen
/// switching fall back to the opposite-sign entry frequencies (uniform if none).
[[nodiscard]] MatrixFit fit_switch_matrix(std::span<const int> labels, std::span<const int> switch_indices,
                                          int m);

/// Count ratio over every consecutive labelled pair. Unseen states get an identity row.
[[nodiscard]] MatrixFit fit_compact_matrix(std::span<const int> labels, int num_states);

struct ErrorPmfFit {
    std::vector<QuantileBins> error_bins;
    std::vector<std::vector<std::vector<Pmf>>> stay;
    std::vector<std::vector<Pmf>> entry;
    int stay_fallbacks = 0;
    int entry_fallbacks = 0;
};

/// Conditional successor-error PMFs. `conditions` may be empty (single class);
/// otherwise conditions[t+1] keys the pair (t, t+1).
[[nodiscard]] ErrorPmfFit fit_error_pmfs(std::span<const double> errors, std::span<const int> labels,
                                         std::span<const int> switch_indices, const ModelHyperparams& hyper,
                                         std::span<const int> conditions = {}, int num_conditions = 1);

/// Full fit. Errors are snapped to the grid first.
[[nodiscard]] CrossingStateModel fit_crossing_model(std::span<const double> errors, const ModelHyperparams& hyper,
                                                    std::span<const int> conditions = {},
                                                    int num_conditions = 1);

/// Next-error PMF given the full information state (state, running time, error bin).
[[nodiscard]] Pmf predictive_pmf_full(const CrossingStateModel& model, int state, int tau, int error_bin,
                                      int condition = 0);

/// Next-error PMF under the Markov approximation (no running time).
[[nodiscard]] Pmf predictive_pmf_compact(const CrossingStateModel& model, int state, int error_bin,
                                         int condition = 0);

struct SampledPath {
    std::vector<double> errors;
    std::vector<int> states;
    std::vector<int> taus;
};

/// Semi-Markov forward sample of `horizon` points. conditions[t] (if given)
/// keys the draw of errors[t]. Without an initial error the first state is
/// drawn from the training occupancy and its error from the entry PMF.
[[nodiscard]] SampledPath sample_path(const CrossingStateModel& model, int horizon, std::uint64_t seed,
                                      std::span<const int> conditions = {},
                                      std::optional<double> initial_error = std::nullopt,
                                      std::uint64_t stream = 0);

/// Forward sample of the compact Markov approximation.
[[nodiscard]] SampledPath sample_path_compact(const CrossingStateModel& model, int horizon, std::uint64_t seed,
                                              std::span<const int> conditions = {},
                                              std::optional<double> initial_error = std::nullopt,
                                              std::uint64_t stream = 0);

/// Index of a draw from `pmf` using uniform u in [0,1).
[[nodiscard]] int draw_index(std::span<const double> pmf, double u);

}  // namespace hsadp
