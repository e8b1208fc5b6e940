#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hsadp/storage_mdp.hpp"

namespace hsadp {

enum class TerminalRule { Zero, Salvage };
enum class Loss { Squared, Absolute };

struct SolveProgress {
    int t = 0;
    double seconds = 0.0;
    std::size_t evaluated_states = 0;  ///< pre-decision states maximized at this step
    std::size_t table_entries = 0;     ///< post-decision entries written at this step
};

struct SolverConfig {
    double alpha = 1.0;
    TerminalRule terminal = TerminalRule::Zero;
    Loss loss = Loss::Squared;
    std::uint64_t seed = 0;
    int threads = 1;
    std::size_t max_table_entries = std::size_t{1} << 28;
    std::function<void(const SolveProgress&)> progress;

    void validate() const;
};

/// V_T(R): zero, or the stored energy valued at the mean price reference.
[[nodiscard]] double terminal_value(const StorageMdp& mdp, TerminalRule rule, int level);

/// Post-decision values V^x_t[R][wind info][price info] for t = 0..T, in dollars.
class LookupVFA {
public:
    LookupVFA() = default;
    LookupVFA(int horizon, int levels, int wind_info, int price_info);

    [[nodiscard]] int horizon() const { return horizon_; }
    [[nodiscard]] int levels() const { return levels_; }
    [[nodiscard]] int wind_info() const { return wind_info_; }
    [[nodiscard]] int price_info() const { return price_info_; }
    [[nodiscard]] std::size_t stage_size() const {
        return static_cast<std::size_t>(levels_) * wind_info_ * price_info_;
    }
    [[nodiscard]] std::size_t index(int t, int level, int ie, int ip) const {
        return static_cast<std::size_t>(t) * stage_size() +
               (static_cast<std::size_t>(level) * wind_info_ + ie) * price_info_ + ip;
    }
    [[nodiscard]] double at(int t, int level, int ie, int ip) const { return values_[index(t, level, ie, ip)]; }
    double& at(int t, int level, int ie, int ip) { return values_[index(t, level, ie, ip)]; }
    [[nodiscard]] std::span<double> stage(int t) { return {values_.data() + t * stage_size(), stage_size()}; }
    [[nodiscard]] std::span<const double> stage(int t) const {
        return {values_.data() + t * stage_size(), stage_size()};
    }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    friend bool operator==(const LookupVFA&, const LookupVFA&) = default;

private:
    int horizon_ = 0;
    int levels_ = 0;
    int wind_info_ = 0;
    int price_info_ = 0;
    std::vector<double> values_;
};

/// Fitted coefficients per time step. "pre" vectors regress pre-decision values
/// on basis features (backward parametric ADP); "post" vectors regress
/// post-decision values on post-decision features (policy iteration).
struct LinearVFA {
    std::string feature_space = "pre";
    std::string basis = "standard";
    std::vector<std::vector<double>> theta;  ///< t = 0..T

    friend bool operator==(const LinearVFA&, const LinearVFA&) = default;
};

/// Feature map over compact pre-decision states at time t. Index 0 is the intercept.
class Basis {
public:
    virtual ~Basis() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    [[nodiscard]] virtual int size(int t) const = 0;
    virtual void features(const StorageMdp& mdp, int t, const CompactPre& s, std::span<double> out) const = 0;
    /// E[features(S_{t+1}) | post at t]. The default sums over all successors.
    virtual void expected_features(const StorageMdp& mdp, const CompactPost& post, std::span<double> out) const;
    /// theta . E[features(S_{t+1}) | post].
    [[nodiscard]] virtual double expected_value(const StorageMdp& mdp, const CompactPost& post,
                                                std::span<const double> theta) const;
};

/// 1, (C^E-.5)(B^E+1), E, E^2, (C^P-.5)(B^P+1), P, P^2, R, R^2, EP, ER, PR with
/// E in kW, P in $/MWh and R in kWh.
class StandardBasis final : public Basis {
public:
    static constexpr int kSize = 12;
    [[nodiscard]] std::string name() const override { return "standard"; }
    [[nodiscard]] int size(int) const override { return kSize; }
    void features(const StorageMdp& mdp, int t, const CompactPre& s, std::span<double> out) const override;
    void expected_features(const StorageMdp& mdp, const CompactPost& post, std::span<double> out) const override;

    /// Same features from raw quantities.
    static void evaluate(double wind_feature, double wind_kw, double price_feature, double price, double r_kwh,
                         std::span<double> out);
};

/// Intercept plus one indicator per reachable pre-decision state at t except the first.
class IndicatorBasis final : public Basis {
public:
    explicit IndicatorBasis(const StorageMdp& mdp);
    [[nodiscard]] std::string name() const override { return "indicator"; }
    [[nodiscard]] int size(int t) const override { return static_cast<int>(index_[t].size()) + 1; }
    void features(const StorageMdp& mdp, int t, const CompactPre& s, std::span<double> out) const override;
    [[nodiscard]] double expected_value(const StorageMdp& mdp, const CompactPost& post,
                                        std::span<const double> theta) const override;

private:
    [[nodiscard]] int column(int t, const CompactPre& s) const;

    std::vector<std::vector<std::int64_t>> index_;  ///< sorted flat state ids per t; position = column - 1
    std::int64_t wind_pre_ = 0;
    std::int64_t price_pre_ = 0;
};

[[nodiscard]] std::unique_ptr<Basis> make_basis(const std::string& name, const StorageMdp& mdp);

/// Expected post-decision values of a parametric fit: V^x_t = theta_{t+1} . E[phi(S_{t+1})].
[[nodiscard]] LookupVFA linear_post_table(const StorageMdp& mdp, const Basis& basis, const LinearVFA& vfa,
                                          TerminalRule terminal, int threads = 1);

}  // namespace hsadp
