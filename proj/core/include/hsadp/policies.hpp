#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hsadp/vfa.hpp"

namespace hsadp {

class Policy {
public:
    virtual ~Policy() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    /// A decision satisfying D1-D5 at state `s`.
    [[nodiscard]] virtual Decision decide(const StorageMdp& mdp, const SystemState& s) const = 0;
};

using PolicyPtr = std::shared_ptr<const Policy>;

/// First feasible decision maximizing contribution + value(next level); later
/// decisions win only by more than a relative 1e-12, so ties go to the
/// lexicographically smallest decision.
[[nodiscard]] Decision argmax_decision(const StorageMdp& mdp, const SystemState& s,
                                       const std::function<double(int next_level)>& value,
                                       double* best_value = nullptr);

/// Belief-weighted post-decision value of each next level at state `s`.
[[nodiscard]] std::vector<double> expected_post_values(const StorageMdp& mdp, const LookupVFA& vfa,
                                                       const SystemState& s);

[[nodiscard]] Decision vfa_decide(const StorageMdp& mdp, const SystemState& s, const LookupVFA& vfa);

/// max_x C(s, x) + E[V^x_t | s]: the value the table assigns to a pre-decision state.
[[nodiscard]] double state_value(const StorageMdp& mdp, const LookupVFA& vfa, const SystemState& s);

class LookupPolicy final : public Policy {
public:
    LookupPolicy(std::shared_ptr<const LookupVFA> vfa, std::string name);
    [[nodiscard]] std::string name() const override { return name_; }
    [[nodiscard]] Decision decide(const StorageMdp& mdp, const SystemState& s) const override;
    [[nodiscard]] const LookupVFA& vfa() const { return *vfa_; }

private:
    std::shared_ptr<const LookupVFA> vfa_;
    std::string name_;
};

/// Pre-decision linear fit turned into post-decision values by exact expectation.
[[nodiscard]] PolicyPtr make_linear_policy(const StorageMdp& mdp, const LinearVFA& vfa, TerminalRule terminal,
                                           std::string name, int threads = 1);

/// Post-decision features (R^x, E_t, P_t and expected crossing features) as used by policy iteration.
void post_features(const StorageMdp& mdp, const SystemState& s, int next_level, std::span<double> out);

/// Greedy in contribution + theta_t . post_features.
class PostFeaturePolicy final : public Policy {
public:
    PostFeaturePolicy(LinearVFA vfa, std::string name);
    [[nodiscard]] std::string name() const override { return name_; }
    [[nodiscard]] Decision decide(const StorageMdp& mdp, const SystemState& s) const override;

private:
    LinearVFA vfa_;
    std::string name_;
};

class MyopicPolicy final : public Policy {
public:
    [[nodiscard]] std::string name() const override { return "myopic"; }
    [[nodiscard]] Decision decide(const StorageMdp& mdp, const SystemState& s) const override;
};

struct PfaParams {
    double theta_h = 0.0;
    double theta_l = 0.0;

    void validate() const;
    friend bool operator==(const PfaParams&, const PfaParams&) = default;
};

/// Buy-low, sell-high rule. Battery flows are floored to whole level
/// increments so the next level stays on the grid.
[[nodiscard]] Decision pfa_decide(const StorageSpec& spec, const SystemState& s, double load_kw,
                                  const PfaParams& params);

class PfaPolicy final : public Policy {
public:
    explicit PfaPolicy(PfaParams params);
    [[nodiscard]] std::string name() const override { return "pfa"; }
    [[nodiscard]] Decision decide(const StorageMdp& mdp, const SystemState& s) const override;
    [[nodiscard]] const PfaParams& params() const { return params_; }

private:
    PfaParams params_;
};

/// Candidate thresholds; pairs with theta_h <= theta_l are skipped.
struct PfaGrid {
    std::vector<double> highs;
    std::vector<double> lows;
};

/// Quantiles (k + 0.5) / points of the training prices, used for both axes.
[[nodiscard]] PfaGrid default_pfa_grid(std::span<const double> prices, int points = 20);

struct ScenarioSet;

struct PfaTuning {
    PfaParams best;
    double best_mean = 0.0;
    std::vector<PfaParams> evaluated;  ///< in search order
    std::vector<double> means;         ///< mean raw contribution per evaluated pair
};

/// Exhaustive search by mean rollout contribution; ties go to the smallest
/// theta_h, then the smallest theta_l.
[[nodiscard]] PfaTuning tune_pfa(const StorageMdp& mdp, const ScenarioSet& set, const PfaGrid& grid, int threads = 1);

}  // namespace hsadp
