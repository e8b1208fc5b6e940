#pragma once

#include <span>
#include <vector>

#include "hsadp/crossing_model.hpp"

namespace hsadp {

/// Posterior over crossing states plus the running crossing time and the last
/// observed error.
struct KnowledgeState {
    std::vector<double> probs;
    int tau = 0;
    double last_error = 0.0;
    int resets = 0;  ///< zero-likelihood recoveries so far

    friend bool operator==(const KnowledgeState&, const KnowledgeState&) = default;
};

/// Uniform over the m states whose sign matches the error; tau = 0.
[[nodiscard]] KnowledgeState init_belief(const CrossingStateModel& model, double initial_error);

/// Belief-weighted mixture of predictive_pmf_full; error bins are recomputed per state.
[[nodiscard]] Pmf predictive_distribution(const CrossingStateModel& model, const KnowledgeState& k,
                                          int condition = 0);

/// One filtering step with the observation drawn under `condition`. An
/// impossible observation resets the belief to init_belief on it, keeping
/// tau + 1 when the sign is unchanged and 0 otherwise.
[[nodiscard]] KnowledgeState bayes_update(const CrossingStateModel& model, const KnowledgeState& k,
                                          double observed_error, int condition = 0);

inline constexpr int kBruteForceMaxHorizon = 12;

/// Exhaustive enumeration of hidden state sequences under the semi-Markov law.
/// conditions[t] keys observations[t]; empty means condition 0 throughout.
[[nodiscard]] KnowledgeState brute_force_posterior(const CrossingStateModel& model, double initial_error,
                                                   std::span<const double> observations,
                                                   std::span<const int> conditions = {});

/// probs sum to 1 within tol, wrong-sign states carry 0, tau >= 0.
[[nodiscard]] bool belief_is_consistent(const CrossingStateModel& model, const KnowledgeState& k,
                                        double tol = 1e-12);

}  // namespace hsadp
