#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hsadp/crossing_model.hpp"
#include "hsadp/data_io.hpp"
#include "hsadp/storage_mdp.hpp"
#include "hsadp/vfa.hpp"

namespace hsadp::fixtures {

/// CDF over durations from P(D = d), index d (index 0 ignored).
DurationCdf cdf_from_masses(const std::vector<double>& masses);

/// PMF on `grid` with the given (value, probability) pairs.
Pmf pmf_on(const ValueGrid& grid, const std::vector<std::pair<double, double>>& mass);

/// m = n = 1 crossing model with hand-set laws. Compact rows are
/// {stay, 1 - stay} for the down and up states.
struct SimpleLaws {
    ValueGrid grid;
    std::vector<double> down_durations;  ///< P(D = d)
    std::vector<double> up_durations;
    std::vector<std::pair<double, double>> stay_down, stay_up, entry_down, entry_up;
    double compact_stay_down = 0.5;
    double compact_stay_up = 0.5;
};
CrossingStateModel simple_model(const SimpleLaws& laws);

/// Two duration bins per sign with disjoint sojourn supports and two error
/// bins per state on the grid -3..3, so the recursive filter is exact.
CrossingStateModel filter_toy_model();

/// Posterior over crossing states after `observations`, by enumerating every
/// hidden state sequence and scoring it segment by segment with the sojourn
/// laws: P(D = L) for completed segments and P(D >= L) for the last one.
std::vector<double> enumerate_posterior(const CrossingStateModel& model, double initial_error,
                                        const std::vector<double>& observations);

/// Battery with 5 levels, 3 wind values and 3 price values, m = n = 1.
struct TinyInstance {
    CrossingStateModel wind;
    CrossingStateModel price;
    StorageMdp mdp;
};
TinyInstance tiny_instance(int horizon, double eta = 0.9);

/// Top-down memoized expectimax over the compact MDP built directly from the
/// crossing models (m = 1 only), independent of the solver's stage tables.
class Expectimax {
public:
    Expectimax(const StorageMdp& mdp, const CrossingStateModel& wind, const CrossingStateModel& price,
               TerminalRule rule);
    /// Value of the pre-decision state with errors given by grid indices.
    double pre(int t, int level, int wind_index, int price_index);
    /// Expected next pre-decision value after moving to `level` at t.
    double post(int t, int level, int wind_index, int price_index);

private:
    std::vector<std::pair<int, double>> next_values(const CrossingStateModel& m, int index, int condition) const;

    const StorageMdp& mdp_;
    const CrossingStateModel& wind_;
    const CrossingStateModel& price_;
    TerminalRule rule_;
    std::map<std::tuple<int, int, int, int>, double> memo_;
};

/// Generator settings with long, variable down runs and short up runs.
SyntheticSpec crossing_heavy_spec(std::uint64_t seed, int days);

/// Day of load and forecast shaped like the bundled toy files.
Scenario day_scenario(int horizon, double load_scale, double forecast_mean);

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag);
    ~ScratchDir();
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace hsadp::fixtures
