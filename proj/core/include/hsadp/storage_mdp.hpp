#pragma once

#include <string>
#include <vector>

#include "hsadp/belief.hpp"
#include "hsadp/exogenous.hpp"
#include "hsadp/grid.hpp"

namespace hsadp {

inline constexpr double kWindMaxKw = 5000.0;

/// Battery parameters. Energies are kWh per five-minute step unless noted.
struct StorageSpec {
    double r_max_mwh = 1.0;
    double eta = 1.0;
    double rho_ch_kwh = 100.0;
    double rho_dch_kwh = 100.0;
    int r_levels = 2;

    [[nodiscard]] double r_max_kwh() const { return r_max_mwh * 1000.0; }
    [[nodiscard]] double increment_kwh() const { return r_levels > 1 ? r_max_kwh() / (r_levels - 1) : 0.0; }
    [[nodiscard]] double level_kwh(int level) const { return increment_kwh() * level; }
    /// Charge rate relative to capacity, per hour.
    [[nodiscard]] double c_rate() const;
    void validate() const;
};

/// Smallest level count in [30, 60] whose increment divides rho; 41 if none does.
[[nodiscard]] int default_battery_levels(double r_max_mwh, double rho_kwh);

/// Deterministic inputs of one day: load, forecasts, temperature classes and
/// the initial state. All series have horizon + 1 entries.
struct Scenario {
    int horizon = 0;
    std::vector<double> load_kw;
    std::vector<double> wind_forecast_kw;
    std::vector<double> price_reference;
    std::vector<int> price_conditions;
    int initial_level = 0;
    double initial_wind_error = 0.0;
    double initial_price_error = 0.0;
    ValueGrid wind_values{0.0, kWindMaxKw, 100.0};
    ValueGrid price_values{-100.0, 300.0, 2.0};

    void validate() const;
    /// E_t = f^E_t + error, clamped to the wind grid.
    [[nodiscard]] double wind_at(int t, double error) const { return wind_values.snap(wind_forecast_kw[t] + error); }
    [[nodiscard]] double price_at(int t, double error) const { return price_values.snap(price_reference[t] + error); }
};

struct Decision {
    double gl = 0.0;  ///< grid to load
    double gr = 0.0;  ///< grid to battery
    double rg = 0.0;  ///< battery to grid
    double el = 0.0;  ///< wind to load
    double er = 0.0;  ///< wind to battery
    double rl = 0.0;  ///< battery to load

    friend bool operator==(const Decision&, const Decision&) = default;
    friend auto operator<=>(const Decision&, const Decision&) = default;
};

/// Feasible decisions under the reduced decision space, sorted lexicographically
/// by (gl, gr, rg, el, er, rl). Battery flows are multiples of the grid
/// increment so the next level stays on the grid; wind surplus below one
/// charging increment is curtailed.
[[nodiscard]] std::vector<Decision> feasible_decisions(const StorageSpec& spec, int level, double wind_kw,
                                                       double load_kw);

/// Checks the five decision constraints; writes the first violation to `why`.
[[nodiscard]] bool satisfies_constraints(const StorageSpec& spec, int level, double wind_kw, double load_kw,
                                         const Decision& x, std::string* why = nullptr);

/// P (L - x_GR - x_GL + eta x_RG), in dollars with P in $/MWh.
[[nodiscard]] double contribution(double price, double load_kw, const Decision& x, double eta);
/// P (eta x_RG - x_GR - x_GL), the contribution net of serving the load.
[[nodiscard]] double shifted_contribution(double price, const Decision& x, double eta);

/// Next battery level; throws ContractViolation when off grid or out of range.
[[nodiscard]] int transition_resource(const StorageSpec& spec, int level, const Decision& x);

/// Best achievable MWh-equivalent g = (L - gr - gl + eta rg)/1000 per next level,
/// so the best contribution into `next_level` is P * (P >= 0 ? g_max : g_min).
struct MenuEntry {
    int next_level = 0;
    double g_max = 0.0;
    double g_min = 0.0;

    [[nodiscard]] double best_contribution(double price) const { return price * (price >= 0.0 ? g_max : g_min); }
};

[[nodiscard]] std::vector<MenuEntry> decision_menu(const StorageSpec& spec, int level, double wind_kw, double load_kw);

struct StorageMdp {
    StorageSpec spec;
    Scenario scenario;
    ProcessPtr wind;
    ProcessPtr price;

    void validate() const;
    [[nodiscard]] int horizon() const { return scenario.horizon; }
    [[nodiscard]] int num_levels() const { return spec.r_levels; }
    [[nodiscard]] int price_condition(int t) const { return price->condition_for(scenario.price_conditions[t]); }
};

/// Forward pre-decision state with beliefs.
struct SystemState {
    int t = 0;
    int level = 0;
    double wind_kw = 0.0;
    double price = 0.0;
    KnowledgeState wind_k;
    KnowledgeState price_k;
};

/// Forward post-decision state.
struct PostState {
    int t = 0;
    int level = 0;
    KnowledgeState wind_k;
    KnowledgeState price_k;
};

/// Compact post-decision state used by the backward pass.
struct CompactPost {
    int t = 0;
    int level = 0;
    int wind_info = 0;
    int price_info = 0;
};

/// Compact pre-decision state: battery level plus (value, tag) pre ids per process.
struct CompactPre {
    int level = 0;
    int wind_pre = 0;
    int price_pre = 0;
};

/// Pre-decision information reachable at time t (from any information state
/// at t-1), with the quantities each pre id implies.
struct StageSpace {
    int t = 0;
    std::vector<int> wind;        ///< sorted reachable wind pre ids
    std::vector<int> price;       ///< sorted reachable price pre ids
    std::vector<int> wind_pos;    ///< wind pre id -> position, -1 if unreachable
    std::vector<int> price_pos;
    std::vector<int> wind_info;   ///< information state entered, per position
    std::vector<int> price_info;
    std::vector<double> wind_kw;  ///< E_t per position
    std::vector<double> price_value;  ///< P_t per position

    [[nodiscard]] std::size_t size(int levels) const { return static_cast<std::size_t>(levels) * wind.size() * price.size(); }
};

[[nodiscard]] StageSpace stage_space(const StorageMdp& mdp, int t);

[[nodiscard]] SystemState initial_state(const StorageMdp& mdp);
[[nodiscard]] PostState post_decision(const StorageSpec& spec, const SystemState& s, const Decision& x);

/// Reveals the errors of t+1: R stays R^x, E and P rebuilt from forecasts plus the
/// raw errors, beliefs filtered on the grid-snapped errors.
[[nodiscard]] SystemState transition_exogenous(const StorageMdp& mdp, const PostState& post, double wind_error,
                                               double price_error);

/// P(next | post) = 1{level' = R^x} * wind factor * price factor.
[[nodiscard]] double compact_transition_prob(const StorageMdp& mdp, const CompactPost& post, const CompactPre& next);

}  // namespace hsadp
