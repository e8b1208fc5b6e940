#include "hsadp/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsadp/errors.hpp"
#include "hsadp/series.hpp"
#include "hsadp/sim_eval.hpp"

namespace hsadp {

Decision argmax_decision(const StorageMdp& mdp, const SystemState& s, const std::function<double(int)>& value,
                         double* best_value) {
    const double load = mdp.scenario.load_kw[s.t];
    const auto decisions = feasible_decisions(mdp.spec, s.level, s.wind_kw, load);
    std::vector<double> by_level(mdp.num_levels(), std::numeric_limits<double>::quiet_NaN());
    const Decision* best = nullptr;
    double best_v = -std::numeric_limits<double>::infinity();
    for (const Decision& x : decisions) {
        const int next = transition_resource(mdp.spec, s.level, x);
        if (std::isnan(by_level[next])) by_level[next] = value(next);
        const double v = contribution(s.price, load, x, mdp.spec.eta) + by_level[next];
        if (!best || v > best_v + 1e-12 * (1.0 + std::abs(best_v))) {
            best = &x;
            best_v = v;
        }
    }
    if (!best) throw ContractViolation("no feasible decision");
    if (best_value) *best_value = best_v;
    return *best;
}

std::vector<double> expected_post_values(const StorageMdp& mdp, const LookupVFA& vfa, const SystemState& s) {
    if (s.t < 0 || s.t > vfa.horizon()) throw InputError("value table does not cover t=" + std::to_string(s.t));
    const auto wind = mdp.wind->info_distribution(s.wind_k);
    const auto price = mdp.price->info_distribution(s.price_k);
    std::vector<double> out(mdp.num_levels(), 0.0);
    for (int level = 0; level < mdp.num_levels(); ++level) {
        double v = 0.0;
        for (const auto& [ie, pe] : wind)
            for (const auto& [ip, pp] : price) v += pe * pp * vfa.at(s.t, level, ie, ip);
        out[level] = v;
    }
    return out;
}

Decision vfa_decide(const StorageMdp& mdp, const SystemState& s, const LookupVFA& vfa) {
    const auto post = expected_post_values(mdp, vfa, s);
    return argmax_decision(mdp, s, [&](int level) { return post[level]; });
}

double state_value(const StorageMdp& mdp, const LookupVFA& vfa, const SystemState& s) {
    const auto post = expected_post_values(mdp, vfa, s);
    double best = 0.0;
    (void)argmax_decision(mdp, s, [&](int level) { return post[level]; }, &best);
    return best;
}

LookupPolicy::LookupPolicy(std::shared_ptr<const LookupVFA> vfa, std::string name)
    : vfa_(std::move(vfa)), name_(std::move(name)) {
    if (!vfa_) throw InputError("lookup policy needs a value table");
}

Decision LookupPolicy::decide(const StorageMdp& mdp, const SystemState& s) const { return vfa_decide(mdp, s, *vfa_); }

PolicyPtr make_linear_policy(const StorageMdp& mdp, const LinearVFA& vfa, TerminalRule terminal, std::string name,
                             int threads) {
    if (vfa.feature_space != "pre") throw InputError("expected a pre-decision linear fit");
    const auto basis = make_basis(vfa.basis, mdp);
    auto table = std::make_shared<const LookupVFA>(linear_post_table(mdp, *basis, vfa, terminal, threads));
    return std::make_shared<LookupPolicy>(std::move(table), std::move(name));
}

void post_features(const StorageMdp& mdp, const SystemState& s, int next_level, std::span<double> out) {
    StandardBasis::evaluate(mdp.wind->expected_crossing_feature(s.wind_k), s.wind_kw,
                            mdp.price->expected_crossing_feature(s.price_k), s.price, mdp.spec.level_kwh(next_level),
                            out);
}

PostFeaturePolicy::PostFeaturePolicy(LinearVFA vfa, std::string name) : vfa_(std::move(vfa)), name_(std::move(name)) {
    if (vfa_.feature_space != "post") throw InputError("expected a post-decision linear fit");
    for (const auto& theta : vfa_.theta)
        if (theta.size() != static_cast<std::size_t>(StandardBasis::kSize))
            throw InputError("post-decision coefficients must have 12 entries");
}

Decision PostFeaturePolicy::decide(const StorageMdp& mdp, const SystemState& s) const {
    if (s.t >= static_cast<int>(vfa_.theta.size())) throw InputError("coefficients do not cover t");
    const auto& theta = vfa_.theta[s.t];
    std::vector<double> psi(StandardBasis::kSize);
    return argmax_decision(mdp, s, [&](int level) {
        post_features(mdp, s, level, psi);
        double v = 0.0;
        for (std::size_t k = 0; k < psi.size(); ++k) v += theta[k] * psi[k];
        return v;
    });
}

Decision MyopicPolicy::decide(const StorageMdp& mdp, const SystemState& s) const {
    return argmax_decision(mdp, s, [](int) { return 0.0; });
}

void PfaParams::validate() const {
    if (!std::isfinite(theta_h) || !std::isfinite(theta_l)) throw InputError("PFA thresholds must be finite");
    if (!(theta_h > theta_l)) throw InputError("PFA requires theta_h > theta_l");
}

Decision pfa_decide(const StorageSpec& spec, const SystemState& s, double load_kw, const PfaParams& params) {
    const double e = s.wind_kw / kStepsPerHour;
    const double l = load_kw / kStepsPerHour;
    const double r = spec.level_kwh(s.level);
    const double delta = spec.increment_kwh();
    auto whole = [&](double q) { return delta > 0.0 ? std::floor(q / delta + 1e-9) * delta : 0.0; };

    Decision x;
    x.el = std::min(l, e);
    const double unmet = l - x.el;
    if (s.price > params.theta_h) {
        x.rl = whole(std::min(unmet, std::min(r, spec.rho_dch_kwh)));
        x.rg = whole(std::min(r - x.rl, spec.rho_dch_kwh - x.rl));
    }
    x.gl = std::max(0.0, unmet - spec.eta * x.rl);

    const double room = std::max(0.0, std::min(spec.rho_ch_kwh, spec.r_max_kwh() - r));
    const double er_star = std::min(e - x.el, room);
    const double target = s.price < params.theta_l ? room : er_star;
    if (delta > 0.0) {
        const double input = whole(spec.eta * target) / spec.eta;
        x.er = std::min(er_star, input);
        x.gr = input - x.er;
    }
    return x;
}

PfaPolicy::PfaPolicy(PfaParams params) : params_(params) { params_.validate(); }

Decision PfaPolicy::decide(const StorageMdp& mdp, const SystemState& s) const {
    return pfa_decide(mdp.spec, s, mdp.scenario.load_kw[s.t], params_);
}

PfaGrid default_pfa_grid(std::span<const double> prices, int points) {
    if (prices.empty()) throw InputError("PFA grid needs training prices");
    if (points < 1) throw InputError("PFA grid needs at least one point");
    std::vector<double> sorted(prices.begin(), prices.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> q;
    for (int k = 0; k < points; ++k) {
        const auto idx = static_cast<std::size_t>((k + 0.5) / points * static_cast<double>(sorted.size()));
        q.push_back(sorted[std::min(idx, sorted.size() - 1)]);
    }
    q.erase(std::unique(q.begin(), q.end()), q.end());
    return {q, q};
}

PfaTuning tune_pfa(const StorageMdp& mdp, const ScenarioSet& set, const PfaGrid& grid, int threads) {
    std::vector<double> highs = grid.highs, lows = grid.lows;
    std::sort(highs.begin(), highs.end());
    std::sort(lows.begin(), lows.end());
    PfaTuning out;
    for (double h : highs)
        for (double l : lows)
            if (h > l) out.evaluated.push_back({h, l});
    if (out.evaluated.empty()) throw InputError("PFA grid has no pair with theta_h > theta_l");
    if (set.paths.empty()) throw InputError("PFA tuning needs at least one scenario path");
    bool first = true;
    for (const PfaParams& p : out.evaluated) {
        const PfaPolicy policy(p);
        const double mean = evaluate_profit(policy, mdp, set, threads).mean_raw;
        out.means.push_back(mean);
        if (first || mean > out.best_mean) {
            out.best = p;
            out.best_mean = mean;
            first = false;
        }
    }
    return out;
}

}  // namespace hsadp
