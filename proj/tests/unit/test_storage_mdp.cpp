#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "hsadp/errors.hpp"

using namespace hsadp;
using namespace hsadp::fixtures;

namespace {

bool within(double a, double b) { return a <= b + 1e-9 * (1.0 + std::abs(b)); }

/// The five decision constraints written out directly.
bool feasible(const StorageSpec& spec, int level, double wind_kw, double load_kw, const Decision& x) {
    const double e = wind_kw / 12.0;
    const double l = load_kw / 12.0;
    const double r = spec.r_max_mwh * 1000.0 * level / (spec.r_levels - 1);
    for (double v : {x.gl, x.gr, x.rg, x.el, x.er, x.rl})
        if (v < -1e-12) return false;
    return within(x.el + x.er, e) && std::abs(x.gl + x.el + spec.eta * x.rl - l) < 1e-9 * (1.0 + l) &&
           within(x.rg + x.rl, std::min(r, spec.rho_dch_kwh)) &&
           within(x.er + x.gr, std::min(spec.rho_ch_kwh, spec.r_max_mwh * 1000.0 - r));
}

/// Every on-grid battery move with wind serving load first and surplus
/// wind charging before the grid.
std::set<Decision> brute_force(const StorageSpec& spec, int level, double wind_kw, double load_kw) {
    const double e = wind_kw / 12.0;
    const double l = load_kw / 12.0;
    const double delta = spec.r_max_mwh * 1000.0 / (spec.r_levels - 1);
    std::set<Decision> out;
    for (int k = 0; k < spec.r_levels; ++k)
        for (int a = 0; a < spec.r_levels; ++a)
            for (int g = 0; g < spec.r_levels; ++g) {
                Decision x;
                x.el = std::min(e, l);
                const double input = k * delta / spec.eta;
                x.er = std::min(e - x.el, input);
                x.gr = input - x.er;
                x.rl = a * delta;
                x.gl = l - x.el - spec.eta * x.rl;
                if (x.gl < 0.0 && x.gl > -1e-9) x.gl = 0.0;
                x.rg = g * delta;
                if (feasible(spec, level, wind_kw, load_kw, x)) out.insert(x);
            }
    return out;
}

StorageSpec spec_of(double rmax, double eta, double rho, int levels) {
    StorageSpec s;
    s.r_max_mwh = rmax;
    s.eta = eta;
    s.rho_ch_kwh = rho;
    s.rho_dch_kwh = rho;
    s.r_levels = levels;
    return s;
}

}  // namespace

TEST_CASE("feasible decisions equal the brute-force enumeration") {
    const std::vector<StorageSpec> specs = {spec_of(0.2, 0.9, 50.0, 5), spec_of(0.2, 1.0, 50.0, 5),
                                            spec_of(0.3, 0.85, 25.0, 7)};
    for (const StorageSpec& spec : specs)
        for (int level = 0; level < spec.r_levels; ++level)
            for (double wind : {0.0, 300.0, 1200.0, 2600.0})
                for (double load : {0.0, 600.0, 1500.0}) {
                    const auto got = feasible_decisions(spec, level, wind, load);
                    CHECK(std::is_sorted(got.begin(), got.end()));
                    std::set<Decision> got_set;
                    for (const Decision& x : got) {
                        CHECK(feasible(spec, level, wind, load, x));
                        CHECK(satisfies_constraints(spec, level, wind, load, x));
                        got_set.insert(x);
                    }
                    CHECK(got_set.size() == got.size());
                    const auto want = brute_force(spec, level, wind, load);
                    REQUIRE(got_set.size() == want.size());
                    auto it = want.begin();
                    for (const Decision& x : got_set) {
                        CHECK(x.gl == doctest::Approx(it->gl));
                        CHECK(x.gr == doctest::Approx(it->gr));
                        CHECK(x.rg == doctest::Approx(it->rg));
                        CHECK(x.er == doctest::Approx(it->er));
                        CHECK(x.rl == doctest::Approx(it->rl));
                        ++it;
                    }
                }
}

TEST_CASE("do-nothing is always feasible") {
    const StorageSpec spec = spec_of(0.2, 0.9, 50.0, 5);
    for (int level = 0; level < 5; ++level) {
        const auto xs = feasible_decisions(spec, level, 500.0, 900.0);
        const bool idle = std::any_of(xs.begin(), xs.end(), [&](const Decision& x) {
            return x.gr == 0.0 && x.er == 0.0 && x.rg == 0.0 && x.rl == 0.0;
        });
        CHECK(idle);
    }
}

TEST_CASE("constraint checker names the violation") {
    const StorageSpec spec = spec_of(0.2, 0.9, 50.0, 5);
    std::string why;
    Decision x;
    x.gl = 100.0 / 12.0;
    CHECK(satisfies_constraints(spec, 0, 0.0, 100.0, x, &why));
    x.rl = 10.0;
    CHECK_FALSE(satisfies_constraints(spec, 0, 0.0, 100.0, x, &why));
    CHECK(why == "load not met exactly");
    Decision y;
    y.gl = 100.0 / 12.0;
    y.rg = 10.0;
    CHECK_FALSE(satisfies_constraints(spec, 0, 0.0, 100.0, y, &why));
    CHECK(why == "battery discharge limit exceeded");
    Decision z;
    z.gl = 100.0 / 12.0;
    z.gr = 60.0;
    CHECK_FALSE(satisfies_constraints(spec, 0, 0.0, 100.0, z, &why));
    CHECK(why == "battery charge limit exceeded");
    Decision w;
    w.el = 20.0;
    CHECK_FALSE(satisfies_constraints(spec, 0, 120.0, 240.0, w, &why));
    CHECK(why == "wind use exceeds production");
}

TEST_CASE("contribution and resource transition") {
    Decision x;
    x.gl = 10.0;
    x.gr = 5.0;
    x.rg = 20.0;
    CHECK(contribution(40.0, 1200.0, x, 0.9) == doctest::Approx(40.0 * (100.0 - 5.0 - 10.0 + 18.0) / 1000.0));
    CHECK(shifted_contribution(40.0, x, 0.9) == doctest::Approx(40.0 * (18.0 - 5.0 - 10.0) / 1000.0));

    const StorageSpec spec = spec_of(0.2, 0.9, 50.0, 5);
    Decision c;
    c.gr = 50.0 / 0.9;
    CHECK(transition_resource(spec, 1, c) == 2);
    Decision d;
    d.rg = 100.0;
    CHECK(transition_resource(spec, 3, d) == 1);
    Decision off;
    off.rg = 25.0;
    CHECK_THROWS_AS((void)transition_resource(spec, 3, off), ContractViolation);
    Decision under;
    under.rg = 100.0;
    CHECK_THROWS_AS((void)transition_resource(spec, 1, under), ContractViolation);
}

TEST_CASE("decision menu holds the extreme net purchase per next level") {
    const StorageSpec spec = spec_of(0.3, 0.85, 25.0, 7);
    for (int level = 0; level < 7; ++level)
        for (double wind : {0.0, 900.0, 2600.0}) {
            const double load = 1100.0;
            std::map<int, std::pair<double, double>> ext;
            for (const Decision& x : feasible_decisions(spec, level, wind, load)) {
                const int next = transition_resource(spec, level, x);
                const double g = contribution(1.0, load, x, spec.eta);
                auto [it, fresh] = ext.try_emplace(next, g, g);
                it->second.first = std::max(it->second.first, g);
                it->second.second = std::min(it->second.second, g);
            }
            const auto menu = decision_menu(spec, level, wind, load);
            REQUIRE(menu.size() == ext.size());
            for (const MenuEntry& m : menu) {
                REQUIRE(ext.count(m.next_level) == 1);
                CHECK(m.g_max == doctest::Approx(ext[m.next_level].first));
                CHECK(m.g_min == doctest::Approx(ext[m.next_level].second));
                for (double price : {-20.0, 0.0, 35.0}) {
                    double best = -1e300;
                    for (const Decision& x : feasible_decisions(spec, level, wind, load))
                        if (transition_resource(spec, level, x) == m.next_level)
                            best = std::max(best, contribution(price, load, x, spec.eta));
                    CHECK(m.best_contribution(price) == doctest::Approx(best));
                }
            }
        }
}

TEST_CASE("default battery levels divide the rate into whole increments") {
    CHECK(default_battery_levels(3.2, 160.0) == 41);
    CHECK(default_battery_levels(1.0, 100.0) == 31);
    const int n = default_battery_levels(0.4, 40.0);
    const double inc = 400.0 / (n - 1);
    CHECK(std::abs(40.0 / inc - std::round(40.0 / inc)) < 1e-9);
    CHECK(n >= 30);
    CHECK(n <= 60);
    CHECK(default_battery_levels(1.0, 33.3) == 41);
}

TEST_CASE("storage spec validation") {
    StorageSpec s = spec_of(0.2, 0.9, 50.0, 5);
    CHECK_NOTHROW(s.validate());
    s.eta = 1.2;
    CHECK_THROWS_AS(s.validate(), InputError);
    s = spec_of(0.2, 0.9, -1.0, 5);
    CHECK_THROWS_AS(s.validate(), InputError);
    s = spec_of(0.2, 0.9, 50.0, 5);
    CHECK(s.increment_kwh() == doctest::Approx(50.0));
    CHECK(s.c_rate() == doctest::Approx(50.0 * 12.0 / 200.0));
}

TEST_CASE("compact transition probabilities sum to one") {
    const TinyInstance inst = tiny_instance(3);
    const StorageMdp& mdp = inst.mdp;
    for (int t = 0; t < mdp.horizon(); ++t) {
        const StageSpace next = stage_space(mdp, t + 1);
        for (int level = 0; level < mdp.num_levels(); ++level)
            for (int ie = 0; ie < mdp.wind->num_info_states(); ++ie)
                for (int ip = 0; ip < mdp.price->num_info_states(); ++ip) {
                    double total = 0.0;
                    for (int r = 0; r < mdp.num_levels(); ++r)
                        for (int w : next.wind)
                            for (int p : next.price) {
                                const double q = compact_transition_prob(mdp, {t, level, ie, ip}, {r, w, p});
                                if (r != level) CHECK(q == 0.0);
                                total += q;
                            }
                    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
                }
    }
}

TEST_CASE("stage space reports values implied by each pre id") {
    const TinyInstance inst = tiny_instance(3);
    const StorageMdp& mdp = inst.mdp;
    const StageSpace s = stage_space(mdp, 2);
    CHECK(s.wind.size() == 3u);
    CHECK(s.price.size() == 3u);
    for (std::size_t i = 0; i < s.wind.size(); ++i) {
        const double err = inst.wind.grid().value(mdp.wind->value_of_pre(s.wind[i]));
        CHECK(s.wind_kw[i] == doctest::Approx(mdp.scenario.wind_at(2, err)));
        CHECK(s.wind_pos[s.wind[i]] == static_cast<int>(i));
    }
    for (std::size_t i = 0; i < s.price.size(); ++i) {
        const double err = inst.price.grid().value(mdp.price->value_of_pre(s.price[i]));
        CHECK(s.price_value[i] == doctest::Approx(mdp.scenario.price_at(2, err)));
    }
}

TEST_CASE("forward transition keeps the level and rebuilds E and P") {
    const TinyInstance inst = tiny_instance(3);
    const StorageMdp& mdp = inst.mdp;
    const SystemState s0 = initial_state(mdp);
    CHECK(s0.level == 2);
    CHECK(s0.wind_kw == doctest::Approx(mdp.scenario.wind_at(0, 0.0)));
    CHECK(s0.price == doctest::Approx(mdp.scenario.price_at(0, 10.0)));
    const auto xs = feasible_decisions(mdp.spec, s0.level, s0.wind_kw, mdp.scenario.load_kw[0]);
    const PostState post = post_decision(mdp.spec, s0, xs.back());
    CHECK(post.level == transition_resource(mdp.spec, s0.level, xs.back()));
    const SystemState s1 = transition_exogenous(mdp, post, -600.0, -10.0);
    CHECK(s1.t == 1);
    CHECK(s1.level == post.level);
    CHECK(s1.wind_kw == doctest::Approx(mdp.scenario.wind_at(1, -600.0)));
    CHECK(s1.price == doctest::Approx(mdp.scenario.price_at(1, -10.0)));
    CHECK(s1.wind_k.probs[0] == doctest::Approx(1.0));
}

TEST_CASE("scenario validation rejects short series") {
    Scenario sc = day_scenario(10, 1.0, 2000.0);
    sc.price_reference.assign(11, 30.0);
    CHECK_NOTHROW(sc.validate());
    sc.load_kw.pop_back();
    CHECK_THROWS_AS(sc.validate(), InputError);
}
