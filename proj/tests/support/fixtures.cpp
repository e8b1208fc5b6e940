#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hsadp/exogenous.hpp"
#include "hsadp/policies.hpp"
#include "hsadp/rng.hpp"

namespace hsadp::fixtures {

DurationCdf cdf_from_masses(const std::vector<double>& masses) {
    DurationCdf c;
    c.cdf.assign(masses.size(), 0.0);
    double acc = 0.0;
    for (std::size_t d = 1; d < masses.size(); ++d) {
        acc += masses[d];
        c.cdf[d] = acc;
    }
    c.cdf.back() = 1.0;
    c.empty = false;
    return c;
}

Pmf pmf_on(const ValueGrid& grid, const std::vector<std::pair<double, double>>& mass) {
    Pmf p(grid.size(), 0.0);
    for (const auto& [v, q] : mass) p[grid.index_of(v)] += q;
    return p;
}

CrossingStateModel simple_model(const SimpleLaws& laws) {
    CrossingStateModel m;
    m.hyper = {1, 1, laws.grid};
    m.duration_bins = {QuantileBins{}, QuantileBins{}};
    m.sojourn = {cdf_from_masses(laws.down_durations), cdf_from_masses(laws.up_durations)};
    m.error_bins = {QuantileBins{}, QuantileBins{}};
    m.switch_matrix = {{0.0, 1.0}, {1.0, 0.0}};
    m.compact_matrix = {{laws.compact_stay_down, 1.0 - laws.compact_stay_down},
                        {1.0 - laws.compact_stay_up, laws.compact_stay_up}};
    m.stay = {{{pmf_on(laws.grid, laws.stay_down)}, {pmf_on(laws.grid, laws.stay_up)}}};
    m.entry = {{pmf_on(laws.grid, laws.entry_down), pmf_on(laws.grid, laws.entry_up)}};
    m.state_occupancy = {0.5, 0.5};
    m.check_invariants();
    return m;
}

CrossingStateModel filter_toy_model() {
    const ValueGrid g{-3.0, 3.0, 1.0};
    CrossingStateModel m;
    m.hyper = {2, 2, g};
    m.duration_bins = {QuantileBins{{2.0}}, QuantileBins{{1.0}}};
    m.sojourn = {cdf_from_masses({0, 0.5, 0.5}), cdf_from_masses({0, 0, 0, 0.6, 0.4}),
                 cdf_from_masses({0, 1.0}), cdf_from_masses({0, 0, 0.3, 0.7})};
    m.error_bins = {QuantileBins{{-2.0}}, QuantileBins{{-2.0}}, QuantileBins{{1.0}}, QuantileBins{{1.0}}};
    m.switch_matrix = {{0, 0, 0.7, 0.3}, {0, 0, 0.2, 0.8}, {0.4, 0.6, 0, 0}, {0.9, 0.1, 0, 0}};
    m.compact_matrix = {{0.5, 0, 0.35, 0.15}, {0, 0.7, 0.06, 0.24}, {0.4, 0.6, 0, 0}, {0.3, 0.1, 0, 0.6}};
    m.stay = {{
        {pmf_on(g, {{-3, 0.5}, {-2, 0.3}, {-1, 0.2}}), pmf_on(g, {{-2, 0.2}, {-1, 0.4}, {0, 0.4}})},
        {pmf_on(g, {{-3, 0.1}, {-2, 0.6}, {0, 0.3}}), pmf_on(g, {{-3, 0.25}, {-1, 0.25}, {0, 0.5}})},
        {pmf_on(g, {{1, 0.7}, {2, 0.3}}), pmf_on(g, {{2, 0.5}, {3, 0.5}})},
        {pmf_on(g, {{1, 0.2}, {2, 0.2}, {3, 0.6}}), pmf_on(g, {{1, 0.5}, {3, 0.5}})},
    }};
    m.entry = {{pmf_on(g, {{-1, 0.6}, {0, 0.4}}), pmf_on(g, {{-2, 0.5}, {-1, 0.3}, {0, 0.2}}),
                pmf_on(g, {{1, 0.8}, {2, 0.2}}), pmf_on(g, {{1, 0.3}, {2, 0.3}, {3, 0.4}})}};
    m.state_occupancy = {0.25, 0.25, 0.25, 0.25};
    m.check_invariants();
    return m;
}

std::vector<double> enumerate_posterior(const CrossingStateModel& model, double initial_error,
                                        const std::vector<double>& observations) {
    const ValueGrid& g = model.grid();
    std::vector<double> e{g.snap(initial_error)};
    for (double o : observations) e.push_back(g.snap(o));
    const int len = static_cast<int>(e.size());
    const int states = model.num_states();
    auto mass = [&](const Pmf& p, double v) { return p[g.index_of(v)]; };
    auto cdf = [&](int i, int d) { return d <= 0 ? 0.0 : model.sojourn[i].at(d); };
    std::vector<double> post(states, 0.0);
    std::vector<int> seq(len, 0);
    while (true) {
        double w = 0.0;
        if (model.sign_of_state(seq[0]) == crossing_sign(e[0])) {
            w = 1.0 / model.m();
            int start = 0;
            for (int t = 1; t <= len && w > 0.0; ++t) {
                const bool closes = t < len && seq[t] != seq[t - 1];
                if (t == len || closes) {
                    const int i = seq[start];
                    const int l = t - start;
                    if (closes) {
                        w *= (cdf(i, l) - cdf(i, l - 1)) * model.switch_matrix[i][seq[t]] *
                             mass(model.entry[0][seq[t]], e[t]);
                        start = t;
                    } else {
                        w *= 1.0 - cdf(i, l - 1);
                    }
                } else {
                    const int i = seq[t];
                    w *= mass(model.stay[0][i][model.error_bin(i, e[t - 1])], e[t]);
                }
            }
        }
        post[seq[len - 1]] += w;
        int k = 0;
        while (k < len && ++seq[k] == states) seq[k++] = 0;
        if (k == len) break;
    }
    double z = 0.0;
    for (double p : post) z += p;
    for (double& p : post) p /= z;
    return post;
}

TinyInstance tiny_instance(int horizon, double eta) {
    TinyInstance out;
    SimpleLaws w;
    w.grid = {-600.0, 600.0, 600.0};
    w.down_durations = {0, 0.5, 0.5};
    w.up_durations = {0, 0.3, 0.3, 0.4};
    w.stay_down = {{-600, 0.6}, {0, 0.4}};
    w.stay_up = {{600, 1.0}};
    w.entry_down = {{-600, 0.3}, {0, 0.7}};
    w.entry_up = {{600, 1.0}};
    w.compact_stay_down = 0.55;
    w.compact_stay_up = 0.7;
    out.wind = simple_model(w);

    SimpleLaws p;
    p.grid = {-10.0, 10.0, 10.0};
    p.down_durations = {0, 0.2, 0.3, 0.5};
    p.up_durations = {0, 0.6, 0.4};
    p.stay_down = {{-10, 0.5}, {0, 0.5}};
    p.stay_up = {{10, 1.0}};
    p.entry_down = {{-10, 0.8}, {0, 0.2}};
    p.entry_up = {{10, 1.0}};
    p.compact_stay_down = 0.65;
    p.compact_stay_up = 0.4;
    out.price = simple_model(p);

    StorageMdp& mdp = out.mdp;
    mdp.spec.r_max_mwh = 0.2;
    mdp.spec.eta = eta;
    mdp.spec.rho_ch_kwh = 100.0;
    mdp.spec.rho_dch_kwh = 100.0;
    mdp.spec.r_levels = 5;
    Scenario& sc = mdp.scenario;
    sc.horizon = horizon;
    for (int t = 0; t <= horizon; ++t) {
        sc.load_kw.push_back(900.0 + 300.0 * ((t * 7) % 5));
        sc.wind_forecast_kw.push_back(800.0 + 200.0 * ((t * 3) % 4));
        sc.price_reference.push_back(25.0 + 5.0 * ((t * 5) % 6));
    }
    sc.price_conditions.assign(horizon + 1, 0);
    sc.initial_level = 2;
    sc.initial_wind_error = 0.0;
    sc.initial_price_error = 10.0;
    mdp.wind = std::make_shared<HsmmProcess>(out.wind);
    mdp.price = std::make_shared<HsmmProcess>(out.price);
    mdp.validate();
    return out;
}

Expectimax::Expectimax(const StorageMdp& mdp, const CrossingStateModel& wind, const CrossingStateModel& price,
                       TerminalRule rule)
    : mdp_(mdp), wind_(wind), price_(price), rule_(rule) {}

std::vector<std::pair<int, double>> Expectimax::next_values(const CrossingStateModel& m, int index,
                                                            int condition) const {
    const double e = m.grid().value(index);
    const int i = crossing_sign(e);
    const int b = m.error_bin(i, e);
    std::vector<double> mass(m.grid().size(), 0.0);
    for (int j = 0; j < 2; ++j) {
        const double q = m.compact_matrix[i][j];
        const Pmf& pmf = j == i ? m.stay[condition][i][b] : m.entry[condition][j];
        for (std::size_t v = 0; v < pmf.size(); ++v) mass[v] += q * pmf[v];
    }
    std::vector<std::pair<int, double>> out;
    for (std::size_t v = 0; v < mass.size(); ++v)
        if (mass[v] > 0.0) out.emplace_back(static_cast<int>(v), mass[v]);
    return out;
}

double Expectimax::pre(int t, int level, int wind_index, int price_index) {
    const auto key = std::make_tuple(t, level, wind_index, price_index);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const Scenario& sc = mdp_.scenario;
    const double e = sc.wind_at(t, wind_.grid().value(wind_index));
    const double p = sc.price_at(t, price_.grid().value(price_index));
    const double load = sc.load_kw[t];
    double best = -std::numeric_limits<double>::infinity();
    for (const Decision& x : feasible_decisions(mdp_.spec, level, e, load)) {
        const int next = transition_resource(mdp_.spec, level, x);
        const double future =
            t == mdp_.horizon() ? terminal_value(mdp_, rule_, next) : post(t, next, wind_index, price_index);
        best = std::max(best, contribution(p, load, x, mdp_.spec.eta) + future);
    }
    memo_[key] = best;
    return best;
}

double Expectimax::post(int t, int level, int wind_index, int price_index) {
    const int condition = price_.num_conditions > 1 ? mdp_.scenario.price_conditions[t + 1] : 0;
    double acc = 0.0;
    for (const auto& [wv, pw] : next_values(wind_, wind_index, 0))
        for (const auto& [pv, pp] : next_values(price_, price_index, condition))
            acc += pw * pp * pre(t + 1, level, wv, pv);
    return acc;
}

SyntheticSpec crossing_heavy_spec(std::uint64_t seed, int days) {
    SyntheticSpec s;
    s.seed = seed;
    s.days = days;
    s.up_mean_run = 8.0;
    s.up_dispersion = 4.0;
    s.down_mean_run = 40.0;
    s.down_dispersion = 1.2;
    s.wind_amplitude_per_step = 18.0;
    return s;
}

Scenario day_scenario(int horizon, double load_scale, double forecast_mean) {
    Scenario sc;
    sc.horizon = horizon;
    for (int t = 0; t <= horizon; ++t) {
        const double h = (t % kStepsPerDay) / kStepsPerHour;
        const double load = 1800.0 + 500.0 * std::exp(-(h - 18.5) * (h - 18.5) / 8.0) +
                            250.0 * std::exp(-(h - 8.0) * (h - 8.0) / 6.0);
        sc.load_kw.push_back(load_scale * load);
        sc.wind_forecast_kw.push_back(forecast_mean +
                                      0.28 * forecast_mean * std::sin(2.0 * std::numbers::pi * (t + 40) / kStepsPerDay));
    }
    sc.price_conditions.assign(horizon + 1, 0);
    return sc;
}

ScratchDir::ScratchDir(const std::string& tag) {
    namespace fs = std::filesystem;
    const auto base = fs::temp_directory_path();
    const auto salt = static_cast<std::uint64_t>(std::hash<std::string>{}(tag));
    for (int attempt = 0;; ++attempt) {
        const auto suffix = stream_seed(salt, static_cast<std::uint64_t>(attempt)) % 1000000007ULL;
        path_ = base / ("hsadp_" + tag + "_" + std::to_string(suffix));
        if (fs::create_directories(path_)) break;
        if (attempt > 1000) throw std::runtime_error("cannot create scratch directory");
    }
}

ScratchDir::~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace hsadp::fixtures
