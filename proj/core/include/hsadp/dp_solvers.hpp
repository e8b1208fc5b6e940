#pragma once

#include <cstdint>

#include "hsadp/vfa.hpp"

namespace hsadp {

/// Backward induction over the compact MDP: every post-decision state at every
/// t gets the exact expectation of the next pre-decision values.
[[nodiscard]] LookupVFA exact_backward_dp(const StorageMdp& mdp, const SolverConfig& config = {});

/// Backward ADP with lookup tables: each post-decision state samples
/// ceil(alpha * |reachable|) of its next pre-decision states without
/// replacement, the union is maximized once, and the post value is the
/// probability-weighted average over its reachable states in the union.
[[nodiscard]] LookupVFA badp_lookup(const StorageMdp& mdp, const SolverConfig& config);

/// Backward ADP with a parametric surface: at each t, ceil(alpha * |S_t|)
/// pre-decision states are sampled uniformly, maximized against the exact
/// expectation of the surface fitted at t+1, and regressed on the basis.
[[nodiscard]] LinearVFA badp_linear(const StorageMdp& mdp, const SolverConfig& config, const Basis& basis);

struct ApiConfig {
    int iterations = 4;
    int paths_per_iteration = 40;
    int validation_paths = 20;
    double time_budget_seconds = 600.0;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct ApiResult {
    LinearVFA vfa;
    int best_iteration = 0;               ///< 0 is the myopic starting policy
    std::vector<double> validation_mean;  ///< mean validation contribution per iterate
};

/// Approximate policy iteration stand-in: simulate the current policy on paths
/// sampled from the full models, regress Monte Carlo cost-to-go on
/// post-decision features per t, repeat, and keep the best iterate on
/// validation paths.
[[nodiscard]] ApiResult api_train(const StorageMdp& mdp, const ApiConfig& config);

/// Rough post-table entry count; solvers refuse instances above the budget.
[[nodiscard]] std::size_t lookup_table_entries(const StorageMdp& mdp);

}  // namespace hsadp
