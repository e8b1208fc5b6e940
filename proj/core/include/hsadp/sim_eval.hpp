#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hsadp/policies.hpp"

namespace hsadp {

/// One exogenous sample path: errors for t = 0..T, index 0 being the initial error.
struct ScenarioPath {
    std::vector<double> wind_error;
    std::vector<double> price_error;
};

struct ScenarioSet {
    std::string label;
    std::uint64_t seed = 0;
    std::vector<ScenarioPath> paths;

    /// Throws InputError unless every path has `length` points in both series.
    void validate(int length) const;
};

struct TraceStep {
    int t = 0;
    int level = 0;
    double r_kwh = 0.0;
    double wind_kw = 0.0;
    double price = 0.0;
    Decision x;
    double contribution = 0.0;
    double shifted = 0.0;
    std::vector<double> wind_belief;
    std::vector<double> price_belief;
};

struct RolloutTrace {
    std::vector<TraceStep> steps;
    double total = 0.0;          ///< sum of contributions
    double total_shifted = 0.0;  ///< sum of load-shifted contributions
};

/// Rolls a policy over one path. Throws ContractViolation naming the step when
/// a policy returns a decision that breaks a constraint.
[[nodiscard]] RolloutTrace simulate_policy(const Policy& policy, const StorageMdp& mdp, const ScenarioPath& path,
                                           bool keep_beliefs = false);

struct ProfitSummary {
    std::vector<double> raw;      ///< per path
    std::vector<double> shifted;  ///< per path
    double mean_raw = 0.0;
    double mean_shifted = 0.0;
};

[[nodiscard]] ProfitSummary evaluate_profit(const Policy& policy, const StorageMdp& mdp, const ScenarioSet& set,
                                            int threads = 1);

/// 100 * sum(policy) / sum(benchmark) over paired paths.
[[nodiscard]] double percent_of_optimal(std::span<const double> policy, std::span<const double> benchmark);

/// Mean and standard error of the per-path differences a - b.
struct PairedGap {
    double mean = 0.0;
    double std_error = 0.0;
};
[[nodiscard]] PairedGap paired_gap(std::span<const double> a, std::span<const double> b);

/// `count` paths sampled from the given processes; path i uses stream i of
/// each process so every policy sees the same exogenous sequence.
[[nodiscard]] ScenarioSet build_typical_set(const ExogenousProcess& wind, const ExogenousProcess& price,
                                            const Scenario& scenario, int count, std::uint64_t seed,
                                            bool compact = false);

inline constexpr int kWorstCaseBegin = 168;
inline constexpr int kWorstCaseEnd = 240;

/// Indices of the `k` days with the highest mean, highest first; ties keep day order.
[[nodiscard]] std::vector<int> top_mean_days(const std::vector<std::vector<double>>& days, int k);

/// Typical paths with wind zeroed on [168, 240) and price errors taken from
/// one of the five highest-mean days of `price_days` (each T+1 actual prices).
[[nodiscard]] ScenarioSet build_worst_case_set(const ScenarioSet& typical, const Scenario& scenario,
                                               const std::vector<std::vector<double>>& price_days,
                                               std::uint64_t seed);

void write_trace_csv(std::ostream& out, const RolloutTrace& trace);

struct ResultRow {
    std::string policy;
    std::string scenario_set;
    double percent_of_optimal = 0.0;
    double mean_raw = 0.0;
    double mean_shifted = 0.0;
    double std_error_shifted = 0.0;
};

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

/// Fixed-format number for CSV output, stable across runs.
[[nodiscard]] std::string format_number(double v);

}  // namespace hsadp
