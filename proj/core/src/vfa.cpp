#include "hsadp/vfa.hpp"

#include <algorithm>
#include <cmath>

#include "hsadp/errors.hpp"
#include "hsadp/parallel.hpp"

namespace hsadp {

void SolverConfig::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("alpha must be in (0, 1]");
    if (threads < 1) throw InputError("threads must be >= 1");
}

double terminal_value(const StorageMdp& mdp, TerminalRule rule, int level) {
    if (rule == TerminalRule::Zero) return 0.0;
    const auto& ref = mdp.scenario.price_reference;
    KahanSum mean;
    for (double p : ref) mean.add(p);
    return mdp.spec.level_kwh(level) / 1000.0 * mean.value() / static_cast<double>(ref.size());
}

LookupVFA::LookupVFA(int horizon, int levels, int wind_info, int price_info)
    : horizon_(horizon), levels_(levels), wind_info_(wind_info), price_info_(price_info) {
    values_.assign(static_cast<std::size_t>(horizon + 1) * stage_size(), 0.0);
}

void Basis::expected_features(const StorageMdp& mdp, const CompactPost& post, std::span<double> out) const {
    const int t = post.t + 1;
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> phi(out.size());
    const ExogenousProcess& w = *mdp.wind;
    const ExogenousProcess& p = *mdp.price;
    for (const Successor& sw : w.successors(post.wind_info, 0))
        for (const Successor& sp : p.successors(post.price_info, mdp.price_condition(t))) {
            features(mdp, t, {post.level, w.pre_id(sw.value, sw.tag), p.pre_id(sp.value, sp.tag)}, phi);
            const double prob = sw.prob * sp.prob;
            for (std::size_t k = 0; k < phi.size(); ++k) out[k] += prob * phi[k];
        }
}

double Basis::expected_value(const StorageMdp& mdp, const CompactPost& post, std::span<const double> theta) const {
    std::vector<double> phi(theta.size());
    expected_features(mdp, post, phi);
    double v = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) v += theta[k] * phi[k];
    return v;
}

void StandardBasis::evaluate(double wind_feature, double wind_kw, double price_feature, double price, double r_kwh,
                             std::span<double> out) {
    out[0] = 1.0;
    out[1] = wind_feature;
    out[2] = wind_kw;
    out[3] = wind_kw * wind_kw;
    out[4] = price_feature;
    out[5] = price;
    out[6] = price * price;
    out[7] = r_kwh;
    out[8] = r_kwh * r_kwh;
    out[9] = wind_kw * price;
    out[10] = wind_kw * r_kwh;
    out[11] = price * r_kwh;
}

void StandardBasis::features(const StorageMdp& mdp, int t, const CompactPre& s, std::span<double> out) const {
    const ExogenousProcess& w = *mdp.wind;
    const ExogenousProcess& p = *mdp.price;
    const int wv = w.value_of_pre(s.wind_pre);
    const int pv = p.value_of_pre(s.price_pre);
    evaluate(w.crossing_feature(wv, w.tag_of_pre(s.wind_pre)), mdp.scenario.wind_at(t, w.grid().value(wv)),
             p.crossing_feature(pv, p.tag_of_pre(s.price_pre)), mdp.scenario.price_at(t, p.grid().value(pv)),
             mdp.spec.level_kwh(s.level), out);
}

void StandardBasis::expected_features(const StorageMdp& mdp, const CompactPost& post, std::span<double> out) const {
    const int t = post.t + 1;
    const ExogenousProcess& w = *mdp.wind;
    const ExogenousProcess& p = *mdp.price;
    double w1 = 0.0, we = 0.0, we2 = 0.0;
    for (const Successor& s : w.successors(post.wind_info, 0)) {
        const double e = mdp.scenario.wind_at(t, w.grid().value(s.value));
        w1 += s.prob * w.crossing_feature(s.value, s.tag);
        we += s.prob * e;
        we2 += s.prob * e * e;
    }
    double p1 = 0.0, pp = 0.0, pp2 = 0.0;
    for (const Successor& s : p.successors(post.price_info, mdp.price_condition(t))) {
        const double v = mdp.scenario.price_at(t, p.grid().value(s.value));
        p1 += s.prob * p.crossing_feature(s.value, s.tag);
        pp += s.prob * v;
        pp2 += s.prob * v * v;
    }
    const double r = mdp.spec.level_kwh(post.level);
    out[0] = 1.0;
    out[1] = w1;
    out[2] = we;
    out[3] = we2;
    out[4] = p1;
    out[5] = pp;
    out[6] = pp2;
    out[7] = r;
    out[8] = r * r;
    out[9] = we * pp;
    out[10] = we * r;
    out[11] = pp * r;
}

IndicatorBasis::IndicatorBasis(const StorageMdp& mdp) {
    wind_pre_ = mdp.wind->pre_count();
    price_pre_ = mdp.price->pre_count();
    index_.resize(mdp.horizon() + 1);
    for (int t = 0; t <= mdp.horizon(); ++t) {
        const StageSpace space = stage_space(mdp, t);
        auto& ids = index_[t];
        for (int level = 0; level < mdp.num_levels(); ++level)
            for (int w : space.wind)
                for (int p : space.price) ids.push_back((level * wind_pre_ + w) * price_pre_ + p);
        std::sort(ids.begin(), ids.end());
        if (!ids.empty()) ids.erase(ids.begin());
    }
}

int IndicatorBasis::column(int t, const CompactPre& s) const {
    const std::int64_t id = (s.level * wind_pre_ + s.wind_pre) * price_pre_ + s.price_pre;
    const auto& ids = index_[t];
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    return it != ids.end() && *it == id ? 1 + static_cast<int>(it - ids.begin()) : 0;
}

void IndicatorBasis::features(const StorageMdp&, int t, const CompactPre& s, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = 1.0;
    if (const int c = column(t, s); c > 0) out[c] = 1.0;
}

double IndicatorBasis::expected_value(const StorageMdp& mdp, const CompactPost& post,
                                      std::span<const double> theta) const {
    const int t = post.t + 1;
    const ExogenousProcess& w = *mdp.wind;
    const ExogenousProcess& p = *mdp.price;
    double v = theta[0];
    for (const Successor& sw : w.successors(post.wind_info, 0))
        for (const Successor& sp : p.successors(post.price_info, mdp.price_condition(t))) {
            const int c = column(t, {post.level, w.pre_id(sw.value, sw.tag), p.pre_id(sp.value, sp.tag)});
            if (c > 0) v += sw.prob * sp.prob * theta[c];
        }
    return v;
}

std::unique_ptr<Basis> make_basis(const std::string& name, const StorageMdp& mdp) {
    if (name == "standard") return std::make_unique<StandardBasis>();
    if (name == "indicator") return std::make_unique<IndicatorBasis>(mdp);
    throw InputError("unknown basis '" + name + "'");
}

LookupVFA linear_post_table(const StorageMdp& mdp, const Basis& basis, const LinearVFA& vfa, TerminalRule terminal,
                            int threads) {
    const int horizon = mdp.horizon();
    if (static_cast<int>(vfa.theta.size()) != horizon + 1) throw InputError("coefficient count does not match horizon");
    const int ie_count = mdp.wind->num_info_states();
    const int ip_count = mdp.price->num_info_states();
    LookupVFA table(horizon, mdp.num_levels(), ie_count, ip_count);
    for (int level = 0; level < mdp.num_levels(); ++level) {
        const double v = terminal_value(mdp, terminal, level);
        for (int ie = 0; ie < ie_count; ++ie)
            for (int ip = 0; ip < ip_count; ++ip) table.at(horizon, level, ie, ip) = v;
    }
    for (int t = 0; t < horizon; ++t) {
        const auto& theta = vfa.theta[t + 1];
        if (static_cast<int>(theta.size()) != basis.size(t + 1)) throw InputError("coefficient vector has wrong size");
        parallel_for(static_cast<std::size_t>(mdp.num_levels()), threads, [&](std::size_t level) {
            for (int ie = 0; ie < ie_count; ++ie)
                for (int ip = 0; ip < ip_count; ++ip)
                    table.at(t, static_cast<int>(level), ie, ip) =
                        basis.expected_value(mdp, {t, static_cast<int>(level), ie, ip}, theta);
        });
    }
    return table;
}

}  // namespace hsadp
