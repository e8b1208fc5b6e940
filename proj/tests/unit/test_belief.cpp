#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "hsadp/belief.hpp"
#include "hsadp/errors.hpp"

using namespace hsadp;
using namespace hsadp::fixtures;

TEST_CASE("initial belief is uniform over matching states") {
    const CrossingStateModel m = filter_toy_model();
    const KnowledgeState k = init_belief(m, -1.2);
    CHECK(k.probs == std::vector<double>{0.5, 0.5, 0.0, 0.0});
    CHECK(k.tau == 0);
    CHECK(k.last_error == -1.0);
    CHECK(belief_is_consistent(m, k));
    const KnowledgeState u = init_belief(m, 0.6);
    CHECK(u.probs == std::vector<double>{0.0, 0.0, 0.5, 0.5});
}

TEST_CASE("one filtering step by hand") {
    const CrossingStateModel m = filter_toy_model();
    const KnowledgeState k0 = init_belief(m, -1.0);
    // stay: state 0 stays with .5, state 1 with 1 at tau 0; bin of -1 is 1
    const KnowledgeState k1 = bayes_update(m, k0, -1.0);
    const double a = 0.5 * 0.5 * 0.4;
    const double b = 0.5 * 1.0 * 0.25;
    CHECK(k1.tau == 1);
    CHECK(k1.probs[0] == doctest::Approx(a / (a + b)));
    CHECK(k1.probs[1] == doctest::Approx(b / (a + b)));
    // switch after a run of 2: completed state is bin 0 of sign 0
    const KnowledgeState k2 = bayes_update(m, k1, 2.0);
    const double c = 0.7 * 0.2;
    const double d = 0.3 * 0.3;
    CHECK(k2.tau == 0);
    CHECK(k2.probs[2] == doctest::Approx(c / (c + d)));
    CHECK(k2.probs[3] == doctest::Approx(d / (c + d)));
}

TEST_CASE("recursive filter equals enumeration on the toy model") {
    const CrossingStateModel m = filter_toy_model();
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const SampledPath p = sample_path(m, 7, seed);
        const std::vector<double> obs(p.errors.begin() + 1, p.errors.end());
        KnowledgeState k = init_belief(m, p.errors[0]);
        for (double o : obs) {
            k = bayes_update(m, k, o);
            CHECK(belief_is_consistent(m, k));
        }
        CHECK(k.resets == 0);
        const std::vector<double> want = enumerate_posterior(m, p.errors[0], obs);
        const KnowledgeState brute = brute_force_posterior(m, p.errors[0], obs);
        CHECK(brute.tau == k.tau);
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(k.probs[i] - want[i]) <= 1e-12);
            CHECK(std::abs(brute.probs[i] - want[i]) <= 1e-12);
        }
    }
}

TEST_CASE("impossible observations reset the belief") {
    const CrossingStateModel m = filter_toy_model();
    KnowledgeState k = init_belief(m, -1.0);
    k = bayes_update(m, k, -1.0);
    k = bayes_update(m, k, -1.0);
    // state 0 cannot last three steps and state 1 puts no mass on -2 after -1
    const KnowledgeState r = bayes_update(m, k, -2.0);
    CHECK(r.resets == 1);
    CHECK(r.tau == 3);
    CHECK(r.probs == std::vector<double>{0.5, 0.5, 0.0, 0.0});
    CHECK(belief_is_consistent(m, r));
    CHECK_THROWS_AS((void)brute_force_posterior(m, -1.0, std::vector<double>{-1.0, -1.0, -2.0}), ContractViolation);
}

TEST_CASE("predictive distribution mixes the full laws") {
    const CrossingStateModel m = filter_toy_model();
    KnowledgeState k = init_belief(m, 1.0);
    k.probs = {0.0, 0.0, 0.25, 0.75};
    k.tau = 1;
    const Pmf p = predictive_distribution(m, k);
    const Pmf a = predictive_pmf_full(m, 2, 1, 0);
    const Pmf b = predictive_pmf_full(m, 3, 1, 0);
    for (int v = 0; v < 7; ++v) CHECK(p[v] == doctest::Approx(0.25 * a[v] + 0.75 * b[v]));
    CHECK(is_valid_pmf(p));
}

TEST_CASE("brute force guards") {
    const CrossingStateModel m = filter_toy_model();
    CHECK_THROWS_AS((void)brute_force_posterior(m, 1.0, std::vector<double>(13, 1.0)), InputError);
    CHECK_THROWS_AS((void)brute_force_posterior(m, 1.0, std::vector<double>(3, 1.0), std::vector<int>{0}), InputError);
    KnowledgeState bad = init_belief(m, 1.0);
    bad.probs.pop_back();
    CHECK_THROWS_AS((void)bayes_update(m, bad, 1.0), ContractViolation);
    CHECK_FALSE(belief_is_consistent(m, bad));
}
