#include "hsadp/dp_solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "hsadp/errors.hpp"
#include "hsadp/parallel.hpp"
#include "hsadp/regression.hpp"
#include "hsadp/rng.hpp"

namespace hsadp {

namespace {

using Clock = std::chrono::steady_clock;

struct Weighted {
    int pos = 0;
    double prob = 0.0;
};

/// Reachable pre-decision states at t with their decision menus and, per
/// information state at t-1, the successor positions.
struct Stage {
    StageSpace space;
    int nw = 0;
    int np = 0;
    std::vector<int> menu_of_wind;               ///< wind position -> distinct wind value
    std::vector<std::vector<MenuEntry>> menus;   ///< [level * distinct + d]
    int distinct = 0;
    std::vector<std::vector<Weighted>> wind_succ;   ///< per wind info at t-1
    std::vector<std::vector<Weighted>> price_succ;  ///< per price info at t-1

    [[nodiscard]] const std::vector<MenuEntry>& menu(int level, int wpos) const {
        return menus[static_cast<std::size_t>(level) * distinct + menu_of_wind[wpos]];
    }
};

Stage build_stage(const StorageMdp& mdp, int t) {
    Stage s;
    s.space = stage_space(mdp, t);
    s.nw = static_cast<int>(s.space.wind.size());
    s.np = static_cast<int>(s.space.price.size());

    std::vector<double> kw = s.space.wind_kw;
    std::sort(kw.begin(), kw.end());
    kw.erase(std::unique(kw.begin(), kw.end()), kw.end());
    s.distinct = static_cast<int>(kw.size());
    for (double e : s.space.wind_kw)
        s.menu_of_wind.push_back(static_cast<int>(std::lower_bound(kw.begin(), kw.end(), e) - kw.begin()));
    const double load = mdp.scenario.load_kw[t];
    s.menus.resize(static_cast<std::size_t>(mdp.num_levels()) * s.distinct);
    for (int level = 0; level < mdp.num_levels(); ++level)
        for (int d = 0; d < s.distinct; ++d)
            s.menus[static_cast<std::size_t>(level) * s.distinct + d] = decision_menu(mdp.spec, level, kw[d], load);

    if (t > 0) {
        const ExogenousProcess& w = *mdp.wind;
        const ExogenousProcess& p = *mdp.price;
        s.wind_succ.resize(w.num_info_states());
        for (int ie = 0; ie < w.num_info_states(); ++ie)
            for (const Successor& x : w.successors(ie, 0))
                s.wind_succ[ie].push_back({s.space.wind_pos[w.pre_id(x.value, x.tag)], x.prob});
        const int cond = mdp.price_condition(t);
        s.price_succ.resize(p.num_info_states());
        for (int ip = 0; ip < p.num_info_states(); ++ip)
            for (const Successor& x : p.successors(ip, cond))
                s.price_succ[ip].push_back({s.space.price_pos[p.pre_id(x.value, x.tag)], x.prob});
    }
    return s;
}

/// max over the menu of contribution + post value at t.
double pre_value(const Stage& s, std::span<const double> post, int ie_count, int ip_count, int level, int wpos,
                 int ppos) {
    const double price = s.space.price_value[ppos];
    const int ie = s.space.wind_info[wpos];
    const int ip = s.space.price_info[ppos];
    double best = -std::numeric_limits<double>::infinity();
    for (const MenuEntry& m : s.menu(level, wpos)) {
        const double v = m.best_contribution(price) +
                         post[(static_cast<std::size_t>(m.next_level) * ie_count + ie) * ip_count + ip];
        best = std::max(best, v);
    }
    return best;
}

void check_budget(const StorageMdp& mdp, const SolverConfig& config) {
    const std::size_t entries = lookup_table_entries(mdp);
    if (entries > config.max_table_entries)
        throw SolverError("lookup table needs about " + std::to_string(entries) + " entries (" +
                          std::to_string(entries * sizeof(double) / (1024 * 1024)) + " MiB), budget is " +
                          std::to_string(config.max_table_entries));
}

void fill_terminal(const StorageMdp& mdp, TerminalRule rule, std::span<double> stage, int ie_count, int ip_count) {
    for (int level = 0; level < mdp.num_levels(); ++level) {
        const double v = terminal_value(mdp, rule, level);
        std::fill_n(stage.begin() + static_cast<std::ptrdiff_t>(level) * ie_count * ip_count, ie_count * ip_count, v);
    }
}

void report(const SolverConfig& config, int t, Clock::time_point start, std::size_t evaluated, std::size_t entries) {
    if (!config.progress) return;
    SolveProgress p;
    p.t = t;
    p.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    p.evaluated_states = evaluated;
    p.table_entries = entries;
    config.progress(p);
}

/// Exact expectation of the pre-decision values of stage t into post values at t-1.
void exact_stage(const StorageMdp& mdp, const Stage& s, LookupVFA& table, int t, int threads) {
    const int levels = mdp.num_levels();
    const int ie_count = table.wind_info();
    const int ip_count = table.price_info();
    const auto post = table.stage(t);
    parallel_for(static_cast<std::size_t>(levels), threads, [&](std::size_t lv) {
        const int level = static_cast<int>(lv);
        std::vector<double> values(static_cast<std::size_t>(s.nw) * s.np);
        for (int w = 0; w < s.nw; ++w)
            for (int p = 0; p < s.np; ++p)
                values[static_cast<std::size_t>(w) * s.np + p] = pre_value(s, post, ie_count, ip_count, level, w, p);
        // price expectation first, then wind
        std::vector<double> partial(static_cast<std::size_t>(s.nw) * ip_count);
        for (int w = 0; w < s.nw; ++w)
            for (int ip = 0; ip < ip_count; ++ip) {
                double acc = 0.0;
                for (const Weighted& x : s.price_succ[ip]) acc += x.prob * values[static_cast<std::size_t>(w) * s.np + x.pos];
                partial[static_cast<std::size_t>(w) * ip_count + ip] = acc;
            }
        for (int ie = 0; ie < ie_count; ++ie)
            for (int ip = 0; ip < ip_count; ++ip) {
                double acc = 0.0;
                for (const Weighted& x : s.wind_succ[ie])
                    acc += x.prob * partial[static_cast<std::size_t>(x.pos) * ip_count + ip];
                table.at(t - 1, level, ie, ip) = acc;
            }
    });
}

/// Floyd's sampling of k distinct indices from [0, n), returned sorted.
void sample_without_replacement(SplitMix& rng, int n, int k, std::vector<std::uint32_t>& stamp, std::uint32_t mark,
                                std::vector<int>& out) {
    out.clear();
    if (k >= n) {
        for (int j = 0; j < n; ++j) out.push_back(j);
        return;
    }
    if (static_cast<int>(stamp.size()) < n) stamp.resize(n, 0);
    for (int j = n - k; j < n; ++j) {
        const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
        const int pick = stamp[r] == mark ? j : r;
        stamp[pick] = mark;
        out.push_back(pick);
    }
    std::sort(out.begin(), out.end());
}

int sample_count(double alpha, std::size_t n) {
    const double k = std::ceil(alpha * static_cast<double>(n) - 1e-9);
    return static_cast<int>(std::clamp<double>(k, 1.0, static_cast<double>(n)));
}

}  // namespace

std::size_t lookup_table_entries(const StorageMdp& mdp) {
    return static_cast<std::size_t>(mdp.horizon() + 1) * static_cast<std::size_t>(mdp.num_levels()) *
           static_cast<std::size_t>(mdp.wind->num_info_states()) *
           static_cast<std::size_t>(mdp.price->num_info_states());
}

LookupVFA exact_backward_dp(const StorageMdp& mdp, const SolverConfig& config) {
    mdp.validate();
    config.validate();
    check_budget(mdp, config);
    const int horizon = mdp.horizon();
    LookupVFA table(horizon, mdp.num_levels(), mdp.wind->num_info_states(), mdp.price->num_info_states());
    fill_terminal(mdp, config.terminal, table.stage(horizon), table.wind_info(), table.price_info());
    const auto start = Clock::now();
    for (int t = horizon; t >= 1; --t) {
        const Stage s = build_stage(mdp, t);
        exact_stage(mdp, s, table, t, config.threads);
        report(config, t, start, s.space.size(mdp.num_levels()), table.stage_size());
    }
    return table;
}

LookupVFA badp_lookup(const StorageMdp& mdp, const SolverConfig& config) {
    mdp.validate();
    config.validate();
    if (config.alpha >= 1.0) return exact_backward_dp(mdp, config);
    check_budget(mdp, config);
    const int horizon = mdp.horizon();
    const int levels = mdp.num_levels();
    const int ie_count = mdp.wind->num_info_states();
    const int ip_count = mdp.price->num_info_states();
    LookupVFA table(horizon, levels, ie_count, ip_count);
    fill_terminal(mdp, config.terminal, table.stage(horizon), ie_count, ip_count);
    const auto start = Clock::now();

    for (int t = horizon; t >= 1; --t) {
        const Stage s = build_stage(mdp, t);
        const auto post = table.stage(t);
        std::vector<std::size_t> evaluated(levels, 0);
        parallel_for(static_cast<std::size_t>(levels), config.threads, [&](std::size_t lv) {
            const int level = static_cast<int>(lv);
            const std::size_t block = static_cast<std::size_t>(s.nw) * s.np;
            std::vector<char> marked(block, 0);
            std::vector<double> values(block, 0.0);
            std::vector<int> chosen;
            std::vector<std::uint32_t> stamp;
            std::uint32_t mark = 0;
            for (int ie = 0; ie < ie_count; ++ie)
                for (int ip = 0; ip < ip_count; ++ip) {
                    const auto& sw = s.wind_succ[ie];
                    const auto& sp = s.price_succ[ip];
                    const std::size_t n = sw.size() * sp.size();
                    if (n == 0) throw ContractViolation("post-decision state without successors");
                    const std::size_t post_idx = (static_cast<std::size_t>(level) * ie_count + ie) * ip_count + ip;
                    SplitMix rng(config.seed, static_cast<std::uint64_t>(t), post_idx);
                    sample_without_replacement(rng, static_cast<int>(n), sample_count(config.alpha, n), stamp, ++mark,
                                               chosen);
                    for (int j : chosen) {
                        const int w = sw[j / sp.size()].pos;
                        const int p = sp[j % sp.size()].pos;
                        marked[static_cast<std::size_t>(w) * s.np + p] = 1;
                    }
                }
            for (int w = 0; w < s.nw; ++w)
                for (int p = 0; p < s.np; ++p) {
                    const std::size_t k = static_cast<std::size_t>(w) * s.np + p;
                    if (!marked[k]) continue;
                    values[k] = pre_value(s, post, ie_count, ip_count, level, w, p);
                    ++evaluated[lv];
                }
            for (int ie = 0; ie < ie_count; ++ie)
                for (int ip = 0; ip < ip_count; ++ip) {
                    const auto& sw = s.wind_succ[ie];
                    const auto& sp = s.price_succ[ip];
                    double num = 0.0, den = 0.0;
                    for (const Weighted& a : sw)
                        for (const Weighted& b : sp) {
                            const std::size_t k = static_cast<std::size_t>(a.pos) * s.np + b.pos;
                            if (!marked[k]) continue;
                            const double prob = a.prob * b.prob;
                            num += prob * values[k];
                            den += prob;
                        }
                    if (!(den > 0.0)) throw ContractViolation("sampled successors carry no probability");
                    table.at(t - 1, level, ie, ip) = num / den;
                }
        });
        std::size_t total = 0;
        for (std::size_t e : evaluated) total += e;
        report(config, t, start, total, table.stage_size());
    }
    return table;
}

LinearVFA badp_linear(const StorageMdp& mdp, const SolverConfig& config, const Basis& basis) {
    mdp.validate();
    config.validate();
    const int horizon = mdp.horizon();
    const int levels = mdp.num_levels();
    const int ie_count = mdp.wind->num_info_states();
    const int ip_count = mdp.price->num_info_states();
    std::vector<double> post(static_cast<std::size_t>(levels) * ie_count * ip_count);
    fill_terminal(mdp, config.terminal, post, ie_count, ip_count);

    LinearVFA out;
    out.feature_space = "pre";
    out.basis = basis.name();
    out.theta.resize(horizon + 1);
    const auto start = Clock::now();

    for (int t = horizon; t >= 0; --t) {
        const Stage s = build_stage(mdp, t);
        const std::size_t total = s.space.size(levels);
        if (total == 0) throw SolverError("no reachable pre-decision states at t=" + std::to_string(t));
        if (total > static_cast<std::size_t>(std::numeric_limits<int>::max()))
            throw SolverError("pre-decision state space too large to sample: " + std::to_string(total));
        const int rows = sample_count(config.alpha, total);
        std::vector<int> chosen;
        {
            SplitMix rng(config.seed, static_cast<std::uint64_t>(t), 0);
            std::vector<std::uint32_t> stamp;
            sample_without_replacement(rng, static_cast<int>(total), rows, stamp, 1, chosen);
        }
        const int cols = basis.size(t);
        std::vector<double> x(static_cast<std::size_t>(rows) * cols);
        std::vector<double> y(rows);
        parallel_for(static_cast<std::size_t>(rows), config.threads, [&](std::size_t r) {
            const int flat = chosen[r];
            const int p = flat % s.np;
            const int w = (flat / s.np) % s.nw;
            const int level = flat / (s.np * s.nw);
            y[r] = pre_value(s, post, ie_count, ip_count, level, w, p);
            basis.features(mdp, t, {level, s.space.wind[w], s.space.price[p]},
                           std::span<double>(x.data() + r * cols, cols));
        });
        LinearFit fit = fit_linear(x, rows, cols, y, {}, config.loss);
        out.theta[t] = std::move(fit.theta);
        if (t > 0) {
            parallel_for(static_cast<std::size_t>(levels), config.threads, [&](std::size_t lv) {
                for (int ie = 0; ie < ie_count; ++ie)
                    for (int ip = 0; ip < ip_count; ++ip)
                        post[(lv * ie_count + ie) * ip_count + ip] =
                            basis.expected_value(mdp, {t - 1, static_cast<int>(lv), ie, ip}, out.theta[t]);
            });
        }
        report(config, t, start, static_cast<std::size_t>(rows), post.size());
    }
    return out;
}

}  // namespace hsadp
