#include "hsadp/storage_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hsadp/errors.hpp"
#include "hsadp/series.hpp"

namespace hsadp {

namespace {

constexpr double kTol = 1e-9;

double slack(double scale) { return kTol * (1.0 + std::abs(scale)); }

int floor_ratio(double num, double den) { return static_cast<int>(std::floor(num / den + 1e-9)); }

double successor_probability(const ExogenousProcess& p, int info, int condition, int pre) {
    const auto succ = p.successors(info, condition);
    const int value = p.value_of_pre(pre);
    const int tag = p.tag_of_pre(pre);
    const auto it = std::lower_bound(succ.begin(), succ.end(), std::pair{value, tag}, [](const Successor& s, auto key) {
        return s.value != key.first ? s.value < key.first : s.tag < key.second;
    });
    return it != succ.end() && it->value == value && it->tag == tag ? it->prob : 0.0;
}

}  // namespace

double StorageSpec::c_rate() const {
    return r_max_mwh > 0.0 ? rho_dch_kwh * kStepsPerHour / r_max_kwh() : 0.0;
}

void StorageSpec::validate() const {
    if (!(r_max_mwh >= 0.0)) throw InputError("r_max must be >= 0");
    if (!(eta > 0.0 && eta <= 1.0)) throw InputError("eta must be in (0, 1]");
    if (!(rho_ch_kwh >= 0.0) || !(rho_dch_kwh >= 0.0)) throw InputError("charge rates must be >= 0");
    if (r_max_mwh > 0.0) {
        if (r_levels < 2) throw InputError("a battery with capacity needs at least 2 levels");
        if (rho_ch_kwh > r_max_kwh() || rho_dch_kwh > r_max_kwh())
            throw InputError("charge rate exceeds capacity");
    } else if (r_levels != 1) {
        throw InputError("a zero-capacity battery has exactly one level");
    }
}

int default_battery_levels(double r_max_mwh, double rho_kwh) {
    if (r_max_mwh <= 0.0) return 1;
    for (int levels = 30; levels <= 60; ++levels) {
        const double ratio = rho_kwh * (levels - 1) / (r_max_mwh * 1000.0);
        if (ratio >= 1.0 - 1e-9 && std::abs(ratio - std::round(ratio)) < 1e-9) return levels;
    }
    return 41;
}

void Scenario::validate() const {
    if (horizon < 1) throw InputError("horizon must be >= 1");
    const auto n = static_cast<std::size_t>(horizon) + 1;
    if (load_kw.size() != n || wind_forecast_kw.size() != n || price_reference.size() != n ||
        price_conditions.size() != n)
        throw InputError("scenario series must have horizon + 1 entries");
    for (double l : load_kw)
        if (!(l > 0.0)) throw InputError("load must be positive");
    wind_values.validate();
    price_values.validate();
}

std::vector<Decision> feasible_decisions(const StorageSpec& spec, int level, double wind_kw, double load_kw) {
    const double e = wind_kw / kStepsPerHour;
    const double l = load_kw / kStepsPerHour;
    const double delta = spec.increment_kwh();
    Decision base;
    base.el = std::min(e, l);
    std::vector<Decision> out;
    if (delta <= 0.0) {
        base.gl = l - base.el;
        out.push_back(base);
        return out;
    }
    const double r = spec.level_kwh(level);
    const double cap_ch = std::max(0.0, std::min(spec.rho_ch_kwh, spec.r_max_kwh() - r));
    const double er_star = std::min(cap_ch, e - base.el);
    const int kmax = floor_ratio(spec.eta * cap_ch, delta);
    const int dmax = std::min(level, floor_ratio(spec.rho_dch_kwh, delta));
    const double unmet = l - base.el;
    for (int k = 0; k <= kmax; ++k) {
        const double input = k * delta / spec.eta;
        Decision x = base;
        x.er = std::min(er_star, input);
        x.gr = input - x.er;
        for (int a = 0; a <= dmax; ++a) {
            const double rl = a * delta;
            if (spec.eta * rl > unmet + slack(unmet)) break;
            x.rl = rl;
            x.gl = std::max(0.0, unmet - spec.eta * rl);
            for (int g = 0; a + g <= dmax; ++g) {
                x.rg = g * delta;
                out.push_back(x);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool satisfies_constraints(const StorageSpec& spec, int level, double wind_kw, double load_kw, const Decision& x,
                           std::string* why) {
    const double e = wind_kw / kStepsPerHour;
    const double l = load_kw / kStepsPerHour;
    const double r = spec.level_kwh(level);
    auto fail = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    if (x.el + x.er > e + slack(e)) return fail("wind use exceeds production");
    if (std::abs(x.gl + x.el + spec.eta * x.rl - l) > slack(l)) return fail("load not met exactly");
    const double out_cap = std::min(r, spec.rho_dch_kwh);
    if (x.rg + x.rl > out_cap + slack(out_cap)) return fail("battery discharge limit exceeded");
    const double in_cap = std::min(spec.rho_ch_kwh, spec.r_max_kwh() - r);
    if (x.er + x.gr > in_cap + slack(in_cap)) return fail("battery charge limit exceeded");
    for (double v : {x.gl, x.gr, x.rg, x.el, x.er, x.rl})
        if (v < 0.0) return fail("negative flow");
    return true;
}

double contribution(double price, double load_kw, const Decision& x, double eta) {
    return price * (load_kw / kStepsPerHour - x.gr - x.gl + eta * x.rg) / 1000.0;
}

double shifted_contribution(double price, const Decision& x, double eta) {
    return price * (eta * x.rg - x.gr - x.gl) / 1000.0;
}

int transition_resource(const StorageSpec& spec, int level, const Decision& x) {
    const double delta = spec.increment_kwh();
    const double moved = spec.eta * (x.gr + x.er) - x.rl - x.rg;
    if (delta <= 0.0) {
        if (std::abs(moved) > kTol) throw ContractViolation("zero-capacity battery cannot move energy");
        return 0;
    }
    const double next = spec.level_kwh(level) + moved;
    const double steps = next / delta;
    const auto out = static_cast<int>(std::lround(steps));
    if (std::abs(steps - out) > 1e-6) throw ContractViolation("battery level left the grid");
    if (out < 0 || out >= spec.r_levels) throw ContractViolation("battery level out of range");
    return out;
}

std::vector<MenuEntry> decision_menu(const StorageSpec& spec, int level, double wind_kw, double load_kw) {
    std::map<int, MenuEntry> best;
    const double l = load_kw / kStepsPerHour;
    for (const Decision& x : feasible_decisions(spec, level, wind_kw, load_kw)) {
        const int next = transition_resource(spec, level, x);
        const double g = (l - x.gr - x.gl + spec.eta * x.rg) / 1000.0;
        auto [it, fresh] = best.try_emplace(next, MenuEntry{next, g, g});
        if (!fresh) {
            it->second.g_max = std::max(it->second.g_max, g);
            it->second.g_min = std::min(it->second.g_min, g);
        }
    }
    std::vector<MenuEntry> out;
    out.reserve(best.size());
    for (const auto& [_, entry] : best) out.push_back(entry);
    return out;
}

void StorageMdp::validate() const {
    spec.validate();
    scenario.validate();
    if (!wind || !price) throw InputError("both exogenous processes are required");
    if (scenario.initial_level < 0 || scenario.initial_level >= spec.r_levels)
        throw InputError("initial battery level out of range");
    for (int c : scenario.price_conditions)
        if (c < 0 || (price->num_conditions() > 1 && c >= price->num_conditions()))
            throw InputError("price condition label out of range");
}

namespace {

void collect(const ExogenousProcess& p, int condition, std::vector<int>& ids, std::vector<int>& pos) {
    std::vector<char> seen(p.pre_count(), 0);
    for (int info = 0; info < p.num_info_states(); ++info)
        for (const Successor& s : p.successors(info, condition)) seen[p.pre_id(s.value, s.tag)] = 1;
    pos.assign(p.pre_count(), -1);
    for (int id = 0; id < p.pre_count(); ++id)
        if (seen[id]) {
            pos[id] = static_cast<int>(ids.size());
            ids.push_back(id);
        }
}

}  // namespace

StageSpace stage_space(const StorageMdp& mdp, int t) {
    StageSpace out;
    out.t = t;
    const ExogenousProcess& w = *mdp.wind;
    const ExogenousProcess& p = *mdp.price;
    collect(w, 0, out.wind, out.wind_pos);
    collect(p, mdp.price_condition(t), out.price, out.price_pos);
    for (int id : out.wind) {
        out.wind_info.push_back(w.info_state(w.value_of_pre(id), w.tag_of_pre(id)));
        out.wind_kw.push_back(mdp.scenario.wind_at(t, w.grid().value(w.value_of_pre(id))));
    }
    for (int id : out.price) {
        out.price_info.push_back(p.info_state(p.value_of_pre(id), p.tag_of_pre(id)));
        out.price_value.push_back(mdp.scenario.price_at(t, p.grid().value(p.value_of_pre(id))));
    }
    return out;
}

SystemState initial_state(const StorageMdp& mdp) {
    SystemState s;
    s.t = 0;
    s.level = mdp.scenario.initial_level;
    s.wind_k = mdp.wind->initial_knowledge(mdp.scenario.initial_wind_error);
    s.price_k = mdp.price->initial_knowledge(mdp.scenario.initial_price_error);
    s.wind_kw = mdp.scenario.wind_at(0, mdp.scenario.initial_wind_error);
    s.price = mdp.scenario.price_at(0, mdp.scenario.initial_price_error);
    return s;
}

PostState post_decision(const StorageSpec& spec, const SystemState& s, const Decision& x) {
    return PostState{s.t, transition_resource(spec, s.level, x), s.wind_k, s.price_k};
}

SystemState transition_exogenous(const StorageMdp& mdp, const PostState& post, double wind_error,
                                 double price_error) {
    const int t = post.t + 1;
    if (t > mdp.horizon()) throw ContractViolation("transition past the horizon");
    SystemState s;
    s.t = t;
    s.level = post.level;
    s.wind_k = mdp.wind->update_knowledge(post.wind_k, wind_error, 0);
    s.price_k = mdp.price->update_knowledge(post.price_k, price_error, mdp.scenario.price_conditions[t]);
    s.wind_kw = mdp.scenario.wind_at(t, wind_error);
    s.price = mdp.scenario.price_at(t, price_error);
    return s;
}

double compact_transition_prob(const StorageMdp& mdp, const CompactPost& post, const CompactPre& next) {
    if (next.level != post.level) return 0.0;
    const double w = successor_probability(*mdp.wind, post.wind_info, 0, next.wind_pre);
    if (w == 0.0) return 0.0;
    return w * successor_probability(*mdp.price, post.price_info, mdp.price_condition(post.t + 1), next.price_pre);
}

}  // namespace hsadp
