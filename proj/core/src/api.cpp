#include <chrono>
#include <cmath>

#include "hsadp/dp_solvers.hpp"
#include "hsadp/errors.hpp"
#include "hsadp/parallel.hpp"
#include "hsadp/regression.hpp"
#include "hsadp/rng.hpp"
#include "hsadp/sim_eval.hpp"

namespace hsadp {

namespace {

struct Samples {
    std::vector<std::vector<double>> psi;  ///< [t] row-major features over paths
    std::vector<std::vector<double>> togo;  ///< [t] cost-to-go over paths
};

LinearVFA zero_post_vfa(int horizon) {
    LinearVFA v;
    v.feature_space = "post";
    v.basis = "standard";
    v.theta.assign(horizon + 1, std::vector<double>(StandardBasis::kSize, 0.0));
    return v;
}

/// Rolls the current policy and records post-decision features with realized cost-to-go.
Samples collect(const StorageMdp& mdp, const PostFeaturePolicy& policy, const ScenarioSet& set, int threads) {
    const int horizon = mdp.horizon();
    const std::size_t n = set.paths.size();
    const int k = StandardBasis::kSize;
    Samples out;
    out.psi.assign(horizon + 1, std::vector<double>(n * k));
    out.togo.assign(horizon + 1, std::vector<double>(n));
    parallel_for(n, threads, [&](std::size_t i) {
        const RolloutTrace trace = simulate_policy(policy, mdp, set.paths[i]);
        // rebuild the knowledge states to evaluate the post features of the chosen decisions
        SystemState s;
        s.level = mdp.scenario.initial_level;
        s.wind_k = mdp.wind->initial_knowledge(set.paths[i].wind_error[0]);
        s.price_k = mdp.price->initial_knowledge(set.paths[i].price_error[0]);
        double after = 0.0;
        std::vector<double> suffix(horizon + 1);
        for (int t = horizon; t >= 0; --t) {
            suffix[t] = after;
            after += trace.steps[t].contribution;
        }
        for (int t = 0; t <= horizon; ++t) {
            const TraceStep& step = trace.steps[t];
            s.t = t;
            s.level = step.level;
            s.wind_kw = step.wind_kw;
            s.price = step.price;
            const int next = transition_resource(mdp.spec, step.level, step.x);
            post_features(mdp, s, next, std::span<double>(out.psi[t].data() + i * k, k));
            out.togo[t][i] = suffix[t];
            if (t < horizon) {
                s.wind_k = mdp.wind->update_knowledge(s.wind_k, set.paths[i].wind_error[t + 1], 0);
                s.price_k = mdp.price->update_knowledge(s.price_k, set.paths[i].price_error[t + 1],
                                                        mdp.scenario.price_conditions[t + 1]);
            }
        }
    });
    return out;
}

}  // namespace

ApiResult api_train(const StorageMdp& mdp, const ApiConfig& config) {
    mdp.validate();
    if (config.iterations < 0) throw InputError("iterations must be >= 0");
    if (config.paths_per_iteration < 1 || config.validation_paths < 1) throw InputError("path counts must be >= 1");
    if (config.threads < 1) throw InputError("threads must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    const int horizon = mdp.horizon();

    const ScenarioSet validation =
        build_typical_set(*mdp.wind, *mdp.price, mdp.scenario, config.validation_paths, stream_seed(config.seed, 0));
    auto score = [&](const LinearVFA& v) {
        return evaluate_profit(PostFeaturePolicy(v, "api"), mdp, validation, config.threads).mean_raw;
    };

    ApiResult result;
    LinearVFA current = zero_post_vfa(horizon);
    result.vfa = current;
    result.validation_mean.push_back(score(current));
    double best = result.validation_mean.back();

    for (int it = 1; it <= config.iterations; ++it) {
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > config.time_budget_seconds) break;
        const ScenarioSet train = build_typical_set(*mdp.wind, *mdp.price, mdp.scenario, config.paths_per_iteration,
                                                    stream_seed(config.seed, static_cast<std::uint64_t>(it)));
        const Samples samples = collect(mdp, PostFeaturePolicy(current, "api"), train, config.threads);
        LinearVFA next = zero_post_vfa(horizon);
        bool finite = true;
        for (int t = 0; t <= horizon && finite; ++t) {
            next.theta[t] =
                fit_linear(samples.psi[t], config.paths_per_iteration, StandardBasis::kSize, samples.togo[t]).theta;
            for (double c : next.theta[t]) finite = finite && std::isfinite(c);
        }
        if (!finite) break;
        current = std::move(next);
        result.validation_mean.push_back(score(current));
        if (result.validation_mean.back() > best) {
            best = result.validation_mean.back();
            result.vfa = current;
            result.best_iteration = it;
        }
    }
    return result;
}

}  // namespace hsadp
