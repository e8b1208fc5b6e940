#include "hsadp/sim_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "hsadp/errors.hpp"
#include "hsadp/parallel.hpp"
#include "hsadp/rng.hpp"

namespace hsadp {

namespace {

std::string describe(const Decision& x) {
    return "gl=" + format_number(x.gl) + " gr=" + format_number(x.gr) + " rg=" + format_number(x.rg) +
           " el=" + format_number(x.el) + " er=" + format_number(x.er) + " rl=" + format_number(x.rl);
}

double mean_of(std::span<const double> v) {
    if (v.empty()) return 0.0;
    KahanSum s;
    for (double x : v) s.add(x);
    return s.value() / static_cast<double>(v.size());
}

}  // namespace

void ScenarioSet::validate(int length) const {
    for (std::size_t i = 0; i < paths.size(); ++i)
        if (static_cast<int>(paths[i].wind_error.size()) != length ||
            static_cast<int>(paths[i].price_error.size()) != length)
            throw InputError("scenario path " + std::to_string(i) + " does not have " + std::to_string(length) +
                             " points");
}

RolloutTrace simulate_policy(const Policy& policy, const StorageMdp& mdp, const ScenarioPath& path,
                             bool keep_beliefs) {
    const int horizon = mdp.horizon();
    if (static_cast<int>(path.wind_error.size()) != horizon + 1 ||
        static_cast<int>(path.price_error.size()) != horizon + 1)
        throw InputError("scenario path length does not match the horizon");
    SystemState s;
    s.level = mdp.scenario.initial_level;
    s.wind_k = mdp.wind->initial_knowledge(path.wind_error[0]);
    s.price_k = mdp.price->initial_knowledge(path.price_error[0]);
    s.wind_kw = mdp.scenario.wind_at(0, path.wind_error[0]);
    s.price = mdp.scenario.price_at(0, path.price_error[0]);

    RolloutTrace trace;
    trace.steps.reserve(horizon + 1);
    KahanSum total, shifted;
    for (int t = 0; t <= horizon; ++t) {
        const double load = mdp.scenario.load_kw[t];
        const Decision x = policy.decide(mdp, s);
        std::string why;
        if (!satisfies_constraints(mdp.spec, s.level, s.wind_kw, load, x, &why))
            throw ContractViolation(policy.name() + " broke a constraint at t=" + std::to_string(t) + " (" + why +
                                    "): level=" + std::to_string(s.level) + " E=" + format_number(s.wind_kw) +
                                    " P=" + format_number(s.price) + " " + describe(x));
        TraceStep step;
        step.t = t;
        step.level = s.level;
        step.r_kwh = mdp.spec.level_kwh(s.level);
        step.wind_kw = s.wind_kw;
        step.price = s.price;
        step.x = x;
        step.contribution = contribution(s.price, load, x, mdp.spec.eta);
        step.shifted = shifted_contribution(s.price, x, mdp.spec.eta);
        if (keep_beliefs) {
            step.wind_belief = s.wind_k.probs;
            step.price_belief = s.price_k.probs;
        }
        total.add(step.contribution);
        shifted.add(step.shifted);
        trace.steps.push_back(std::move(step));
        const PostState post = post_decision(mdp.spec, s, x);
        if (t < horizon) s = transition_exogenous(mdp, post, path.wind_error[t + 1], path.price_error[t + 1]);
    }
    trace.total = total.value();
    trace.total_shifted = shifted.value();
    return trace;
}

ProfitSummary evaluate_profit(const Policy& policy, const StorageMdp& mdp, const ScenarioSet& set, int threads) {
    ProfitSummary out;
    out.raw.resize(set.paths.size());
    out.shifted.resize(set.paths.size());
    parallel_for(set.paths.size(), threads, [&](std::size_t i) {
        const RolloutTrace trace = simulate_policy(policy, mdp, set.paths[i]);
        out.raw[i] = trace.total;
        out.shifted[i] = trace.total_shifted;
    });
    out.mean_raw = mean_of(out.raw);
    out.mean_shifted = mean_of(out.shifted);
    return out;
}

double percent_of_optimal(std::span<const double> policy, std::span<const double> benchmark) {
    if (policy.size() != benchmark.size()) throw InputError("paired results differ in length");
    KahanSum a, b;
    for (double v : policy) a.add(v);
    for (double v : benchmark) b.add(v);
    if (b.value() == 0.0) throw InputError("benchmark cumulative contribution is zero");
    return 100.0 * a.value() / b.value();
}

PairedGap paired_gap(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InputError("paired results differ in length");
    const std::size_t n = a.size();
    PairedGap g;
    if (n == 0) return g;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
    g.mean = mean_of(d);
    if (n > 1) {
        KahanSum ss;
        for (double x : d) ss.add((x - g.mean) * (x - g.mean));
        g.std_error = std::sqrt(ss.value() / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return g;
}

ScenarioSet build_typical_set(const ExogenousProcess& wind, const ExogenousProcess& price, const Scenario& scenario,
                              int count, std::uint64_t seed, bool compact) {
    if (count < 0) throw InputError("path count must be >= 0");
    ScenarioSet set;
    set.label = "Typ";
    set.seed = seed;
    set.paths.resize(count);
    const int length = scenario.horizon + 1;
    for (int i = 0; i < count; ++i) {
        auto& p = set.paths[i];
        p.wind_error = wind.sample(length, stream_seed(seed, 1), static_cast<std::uint64_t>(i),
                                   scenario.initial_wind_error, {}, compact);
        p.price_error = price.sample(length, stream_seed(seed, 2), static_cast<std::uint64_t>(i),
                                     scenario.initial_price_error, scenario.price_conditions, compact);
    }
    return set;
}

std::vector<int> top_mean_days(const std::vector<std::vector<double>>& days, int k) {
    std::vector<double> means;
    for (const auto& d : days) {
        if (d.empty()) throw InputError("empty price day");
        means.push_back(mean_of(d));
    }
    std::vector<int> order(days.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return means[a] > means[b]; });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(k, 0))));
    return order;
}

ScenarioSet build_worst_case_set(const ScenarioSet& typical, const Scenario& scenario,
                                 const std::vector<std::vector<double>>& price_days, std::uint64_t seed) {
    const int length = scenario.horizon + 1;
    typical.validate(length);
    for (const auto& d : price_days)
        if (static_cast<int>(d.size()) != length) throw InputError("price pool days must have horizon + 1 points");
    const auto pool = top_mean_days(price_days, 5);
    if (pool.empty() && !typical.paths.empty()) throw InputError("worst-case construction needs a price pool");
    ScenarioSet set;
    set.label = "WC";
    set.seed = seed;
    set.paths = typical.paths;
    for (std::size_t i = 0; i < set.paths.size(); ++i) {
        auto& p = set.paths[i];
        for (int t = kWorstCaseBegin; t < std::min(kWorstCaseEnd, length); ++t)
            p.wind_error[t] = -scenario.wind_forecast_kw[t];
        Rng rng(seed, i);
        const auto& day = price_days[pool[rng.below(pool.size())]];
        for (int t = 1; t < length; ++t) p.price_error[t] = day[t] - scenario.price_reference[t];
    }
    return set;
}

std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_trace_csv(std::ostream& out, const RolloutTrace& trace) {
    out << "t,R,E,P,x_GL,x_GR,x_RG,x_EL,x_ER,x_RL,contribution\n";
    for (const TraceStep& s : trace.steps) {
        out << s.t << ',' << format_number(s.r_kwh) << ',' << format_number(s.wind_kw) << ','
            << format_number(s.price) << ',' << format_number(s.x.gl) << ',' << format_number(s.x.gr) << ','
            << format_number(s.x.rg) << ',' << format_number(s.x.el) << ',' << format_number(s.x.er) << ','
            << format_number(s.x.rl) << ',' << format_number(s.contribution) << '\n';
    }
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "policy,scenario_set,percent_of_optimal,mean_contribution,mean_shifted_profit,std_error_shifted\n";
    for (const ResultRow& r : rows)
        out << r.policy << ',' << r.scenario_set << ',' << format_number(r.percent_of_optimal) << ','
            << format_number(r.mean_raw) << ',' << format_number(r.mean_shifted) << ','
            << format_number(r.std_error_shifted) << '\n';
}

}  // namespace hsadp
