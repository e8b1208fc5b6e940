#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsadp/baselines.hpp"
#include "hsadp/belief.hpp"
#include "hsadp/crossing_model.hpp"

namespace hsadp {

/// Next pre-decision information: error grid index plus the hidden tag
/// (duration bin for crossing models, 0 otherwise).
struct Successor {
    int value = 0;
    int tag = 0;
    double prob = 0.0;
};

/// View of an error process used by the solvers. The backward pass works on
/// finite information states with precomputed successor lists; the forward
/// pass tracks a KnowledgeState.
class ExogenousProcess {
public:
    virtual ~ExogenousProcess() = default;

    [[nodiscard]] virtual std::string kind() const = 0;
    [[nodiscard]] virtual const ValueGrid& grid() const = 0;
    [[nodiscard]] virtual int num_tags() const = 0;
    [[nodiscard]] virtual int num_info_states() const = 0;
    [[nodiscard]] virtual int num_conditions() const { return 1; }
    /// Information state after observing grid value `value` under `tag`; -1 if inconsistent.
    [[nodiscard]] virtual int info_state(int value, int tag) const = 0;
    /// Successors of an information state; probabilities sum to 1.
    [[nodiscard]] virtual std::span<const Successor> successors(int info, int condition) const = 0;

    [[nodiscard]] virtual KnowledgeState initial_knowledge(double error) const = 0;
    [[nodiscard]] virtual KnowledgeState update_knowledge(const KnowledgeState& k, double error,
                                                          int condition) const = 0;
    /// Information states implied by a knowledge state, with their probabilities.
    [[nodiscard]] virtual std::vector<std::pair<int, double>> info_distribution(const KnowledgeState& k) const = 0;

    /// (C - 0.5)(B + 1) for a pre-decision (value, tag).
    [[nodiscard]] virtual double crossing_feature(int value, int tag) const = 0;
    [[nodiscard]] virtual double expected_crossing_feature(const KnowledgeState& k) const = 0;

    /// Error path of `length` points starting at `initial`; conditions[t] keys
    /// the draw of point t. `compact` samples the Markov approximation where
    /// the process has one.
    [[nodiscard]] virtual std::vector<double> sample(int length, std::uint64_t seed, std::uint64_t stream,
                                                     double initial, std::span<const int> conditions,
                                                     bool compact = false) const = 0;

    [[nodiscard]] int condition_for(int condition) const { return num_conditions() == 1 ? 0 : condition; }
    [[nodiscard]] int pre_id(int value, int tag) const { return value * num_tags() + tag; }
    [[nodiscard]] int pre_count() const { return grid().size() * num_tags(); }
    [[nodiscard]] int value_of_pre(int pre) const { return pre / num_tags(); }
    [[nodiscard]] int tag_of_pre(int pre) const { return pre % num_tags(); }
};

using ProcessPtr = std::shared_ptr<const ExogenousProcess>;

/// Crossing-state model: compact Markov view backward, full belief filter forward.
class HsmmProcess final : public ExogenousProcess {
public:
    explicit HsmmProcess(CrossingStateModel model);

    [[nodiscard]] std::string kind() const override { return "hsmm"; }
    [[nodiscard]] const ValueGrid& grid() const override { return model_.grid(); }
    [[nodiscard]] int num_tags() const override { return model_.m(); }
    [[nodiscard]] int num_info_states() const override { return model_.num_states() * model_.n(); }
    [[nodiscard]] int num_conditions() const override { return model_.num_conditions; }
    [[nodiscard]] int info_state(int value, int tag) const override;
    [[nodiscard]] std::span<const Successor> successors(int info, int condition) const override;
    [[nodiscard]] KnowledgeState initial_knowledge(double error) const override;
    [[nodiscard]] KnowledgeState update_knowledge(const KnowledgeState& k, double error,
                                                  int condition) const override;
    [[nodiscard]] std::vector<std::pair<int, double>> info_distribution(const KnowledgeState& k) const override;
    [[nodiscard]] double crossing_feature(int value, int tag) const override;
    [[nodiscard]] double expected_crossing_feature(const KnowledgeState& k) const override;
    [[nodiscard]] std::vector<double> sample(int length, std::uint64_t seed, std::uint64_t stream, double initial,
                                             std::span<const int> conditions, bool compact) const override;

    [[nodiscard]] const CrossingStateModel& model() const { return model_; }

private:
    CrossingStateModel model_;
    std::vector<std::vector<std::vector<Successor>>> succ_;  ///< [condition][info]
};

/// Processes whose information state is a function of the last error alone.
class ObservedProcess : public ExogenousProcess {
public:
    [[nodiscard]] const ValueGrid& grid() const override { return grid_; }
    [[nodiscard]] int num_tags() const override { return 1; }
    [[nodiscard]] int num_info_states() const override { return static_cast<int>(succ_.size()); }
    [[nodiscard]] std::span<const Successor> successors(int info, int condition) const override;
    [[nodiscard]] KnowledgeState initial_knowledge(double error) const override;
    [[nodiscard]] KnowledgeState update_knowledge(const KnowledgeState& k, double error,
                                                  int condition) const override;
    [[nodiscard]] std::vector<std::pair<int, double>> info_distribution(const KnowledgeState& k) const override;
    [[nodiscard]] double crossing_feature(int value, int tag) const override;
    [[nodiscard]] double expected_crossing_feature(const KnowledgeState& k) const override;

protected:
    ValueGrid grid_;
    std::vector<std::vector<Successor>> succ_;  ///< per info state
};

/// Successor law of an AR(1) value: nearest-grid discretization of N(gamma x, s^2).
class Ar1Process final : public ObservedProcess {
public:
    Ar1Process(Ar1Params params, ValueGrid grid);
    [[nodiscard]] std::string kind() const override { return "ar1"; }
    [[nodiscard]] int info_state(int value, int tag) const override { return tag == 0 ? value : -1; }
    [[nodiscard]] const Ar1Params& params() const { return params_; }
    [[nodiscard]] std::vector<double> sample(int length, std::uint64_t seed, std::uint64_t stream, double initial,
                                             std::span<const int> conditions, bool compact) const override;

private:
    Ar1Params params_;
};

class MrjdProcess final : public ObservedProcess {
public:
    MrjdProcess(MrjdParams params, ValueGrid grid);
    [[nodiscard]] std::string kind() const override { return "mrjd"; }
    [[nodiscard]] int info_state(int value, int tag) const override { return tag == 0 ? value : -1; }
    [[nodiscard]] const MrjdParams& params() const { return params_; }
    [[nodiscard]] std::vector<double> sample(int length, std::uint64_t seed, std::uint64_t stream, double initial,
                                             std::span<const int> conditions, bool compact) const override;

private:
    MrjdParams params_;
};

class MarkovChainProcess final : public ObservedProcess {
public:
    explicit MarkovChainProcess(MarkovChainParams params);
    [[nodiscard]] std::string kind() const override { return "markov"; }
    [[nodiscard]] int info_state(int value, int tag) const override;
    [[nodiscard]] const MarkovChainParams& params() const { return params_; }
    [[nodiscard]] std::vector<double> sample(int length, std::uint64_t seed, std::uint64_t stream, double initial,
                                             std::span<const int> conditions, bool compact) const override;

private:
    MarkovChainParams params_;
};

/// Nearest-grid probabilities of N(mean, sd^2); the end cells absorb the tails.
[[nodiscard]] Pmf discretized_normal(const ValueGrid& grid, double mean, double sd);

}  // namespace hsadp
