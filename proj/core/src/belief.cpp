#include "hsadp/belief.hpp"

#include <cmath>
#include <string>

#include "hsadp/errors.hpp"

namespace hsadp {

namespace {

double pmf_at(const CrossingStateModel& model, const Pmf& pmf, double error) {
    return pmf[model.grid().index_of(error)];
}

bool scale_to_unit(std::vector<double>& probs) {
    KahanSum total;
    for (double p : probs) total.add(p);
    const double z = total.value();
    if (!(z > 0.0)) return false;
    for (double& p : probs) p /= z;
    return true;
}

}  // namespace

KnowledgeState init_belief(const CrossingStateModel& model, double initial_error) {
    KnowledgeState k;
    k.last_error = model.grid().snap(initial_error);
    k.probs.assign(model.num_states(), 0.0);
    const int sign = crossing_sign(k.last_error);
    for (int b = 0; b < model.m(); ++b) k.probs[model.state_index(sign, b)] = 1.0 / model.m();
    return k;
}

Pmf predictive_distribution(const CrossingStateModel& model, const KnowledgeState& k, int condition) {
    Pmf out(model.grid().size(), 0.0);
    for (int i = 0; i < model.num_states(); ++i) {
        if (k.probs[i] == 0.0) continue;
        const Pmf part = predictive_pmf_full(model, i, k.tau, model.error_bin(i, k.last_error), condition);
        for (std::size_t v = 0; v < out.size(); ++v) out[v] += k.probs[i] * part[v];
    }
    return out;
}

KnowledgeState bayes_update(const CrossingStateModel& model, const KnowledgeState& k, double observed_error,
                            int condition) {
    if (static_cast<int>(k.probs.size()) != model.num_states())
        throw ContractViolation("belief size does not match the model");
    const double obs = model.grid().snap(observed_error);
    const int old_sign = crossing_sign(k.last_error);
    const int new_sign = crossing_sign(obs);
    KnowledgeState out;
    out.last_error = obs;
    out.resets = k.resets;
    out.probs.assign(model.num_states(), 0.0);
    if (new_sign == old_sign) {
        out.tau = k.tau + 1;
        for (int i = 0; i < model.num_states(); ++i) {
            if (k.probs[i] == 0.0) continue;
            const double survive = 1.0 - model.switch_probability(i, k.tau);
            const Pmf& stay = model.stay[condition][i][model.error_bin(i, k.last_error)];
            out.probs[i] = k.probs[i] * survive * pmf_at(model, stay, obs);
        }
    } else {
        out.tau = 0;
        const int completed = model.state_index(old_sign, model.duration_bin(old_sign, k.tau + 1));
        for (int b = 0; b < model.m(); ++b) {
            const int i = model.state_index(new_sign, b);
            out.probs[i] = model.switch_matrix[completed][i] * pmf_at(model, model.entry[condition][i], obs);
        }
    }
    if (!scale_to_unit(out.probs)) {
        KnowledgeState reset = init_belief(model, obs);
        reset.tau = out.tau;
        reset.resets = k.resets + 1;
        return reset;
    }
    return out;
}

KnowledgeState brute_force_posterior(const CrossingStateModel& model, double initial_error,
                                     std::span<const double> observations, std::span<const int> conditions) {
    const int horizon = static_cast<int>(observations.size());
    if (horizon > kBruteForceMaxHorizon)
        throw InputError("brute-force posterior refuses horizons above " + std::to_string(kBruteForceMaxHorizon));
    if (!conditions.empty() && conditions.size() != observations.size())
        throw InputError("conditions and observations are not aligned");
    const ValueGrid& grid = model.grid();
    std::vector<double> e(horizon + 1);
    e[0] = grid.snap(initial_error);
    for (int t = 0; t < horizon; ++t) e[t + 1] = grid.snap(observations[t]);

    const int states = model.num_states();
    std::vector<double> posterior(states, 0.0);
    std::vector<int> seq(horizon + 1, 0);
    long long total = 1;
    for (int t = 0; t <= horizon; ++t) total *= states;
    for (long long code = 0; code < total; ++code) {
        long long rest = code;
        for (int t = 0; t <= horizon; ++t) {
            seq[t] = static_cast<int>(rest % states);
            rest /= states;
        }
        if (model.sign_of_state(seq[0]) != crossing_sign(e[0])) continue;
        double w = 1.0 / model.m();
        int tau = 0;
        for (int t = 0; t < horizon && w > 0.0; ++t) {
            const int c = conditions.empty() ? 0 : conditions[t];
            const int i = seq[t];
            const int j = seq[t + 1];
            const double h = model.switch_probability(i, tau);
            if (i == j) {
                w *= (1.0 - h) * pmf_at(model, model.stay[c][i][model.error_bin(i, e[t])], e[t + 1]);
                ++tau;
            } else {
                w *= h * model.switch_matrix[i][j] * pmf_at(model, model.entry[c][j], e[t + 1]);
                tau = 0;
            }
        }
        posterior[seq[horizon]] += w;
    }
    KnowledgeState out;
    out.last_error = e[horizon];
    for (int t = horizon; t > 0 && crossing_sign(e[t - 1]) == crossing_sign(e[t]); --t) ++out.tau;
    out.probs = posterior;
    if (!scale_to_unit(out.probs)) throw ContractViolation("observation sequence has zero likelihood");
    return out;
}

bool belief_is_consistent(const CrossingStateModel& model, const KnowledgeState& k, double tol) {
    if (k.tau < 0 || static_cast<int>(k.probs.size()) != model.num_states()) return false;
    KahanSum total;
    const int sign = crossing_sign(k.last_error);
    for (int i = 0; i < model.num_states(); ++i) {
        if (k.probs[i] < 0.0) return false;
        if (model.sign_of_state(i) != sign && k.probs[i] != 0.0) return false;
        total.add(k.probs[i]);
    }
    return std::abs(total.value() - 1.0) <= tol;
}

}  // namespace hsadp
