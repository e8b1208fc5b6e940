#include "hsadp/crossing_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsadp/errors.hpp"
#include "hsadp/rng.hpp"

namespace hsadp {

namespace {

int smallest_magnitude_index(const ValueGrid& grid, int sign) {
    const int size = grid.size();
    if (sign == 1) {
        for (int k = 0; k < size; ++k)
            if (grid.value(k) > 0.0) return k;
        return size - 1;
    }
    for (int k = size - 1; k >= 0; --k)
        if (grid.value(k) <= 0.0) return k;
    return 0;
}

Pmf point_mass(const ValueGrid& grid, int index) {
    Pmf out(grid.size(), 0.0);
    out[index] = 1.0;
    return out;
}

bool has_mass(const Pmf& counts) {
    return std::any_of(counts.begin(), counts.end(), [](double c) { return c > 0.0; });
}

void accumulate(Pmf& into, const Pmf& from) {
    for (std::size_t k = 0; k < into.size(); ++k) into[k] += from[k];
}

Pmf normalized(Pmf counts) {
    normalize(counts);
    return counts;
}

void mix_into(Pmf& out, double weight, const Pmf& pmf) {
    if (weight == 0.0) return;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += weight * pmf[k];
}

void check_condition(const CrossingStateModel& model, int condition) {
    if (condition < 0 || condition >= model.num_conditions)
        throw ContractViolation("condition index out of range: " + std::to_string(condition));
}

void check_state(const CrossingStateModel& model, int state) {
    if (state < 0 || state >= model.num_states())
        throw ContractViolation("crossing state out of range: " + std::to_string(state));
}

}  // namespace

void ModelHyperparams::validate() const {
    if (m < 1) throw InputError("m must be >= 1");
    if (n < 1) throw InputError("n must be >= 1");
    grid.validate();
}

void CrossingStateModel::check_invariants() const {
    const int states = num_states();
    auto fail = [](const std::string& what) { throw ContractViolation("model invariant: " + what); };
    if (static_cast<int>(sojourn.size()) != states || static_cast<int>(error_bins.size()) != states)
        fail("per-state tables have wrong size");
    for (int i = 0; i < states; ++i) {
        const auto& c = sojourn[i].cdf;
        for (std::size_t d = 1; d < c.size(); ++d)
            if (c[d] < c[d - 1]) fail("sojourn CDF decreasing");
        if (c.back() != 1.0) fail("sojourn CDF does not reach 1");
        if (error_bins[i].bins() != hyper.n) fail("error bin count");
    }
    for (const Matrix* mat : {&switch_matrix, &compact_matrix}) {
        if (static_cast<int>(mat->size()) != states) fail("matrix rows");
        for (const auto& row : *mat) {
            if (static_cast<int>(row.size()) != states) fail("matrix columns");
            if (std::abs(pmf_total(row) - 1.0) > 1e-12) fail("matrix row does not sum to 1");
        }
    }
    for (int i = 0; i < states; ++i)
        if (switch_matrix[i][i] != 0.0) fail("switch matrix diagonal nonzero");
    const ValueGrid& g = hyper.grid;
    auto sign_consistent = [&](const Pmf& pmf, int sign) {
        for (int k = 0; k < g.size(); ++k)
            if (pmf[k] > 0.0 && crossing_sign(g.value(k)) != sign) return false;
        return true;
    };
    for (int c = 0; c < num_conditions; ++c)
        for (int i = 0; i < states; ++i) {
            for (const Pmf& pmf : stay[c][i]) {
                if (!is_valid_pmf(pmf)) fail("stay PMF not normalized");
                if (!sign_consistent(pmf, sign_of_state(i))) fail("stay PMF has mass of the wrong sign");
            }
            if (!is_valid_pmf(entry[c][i])) fail("entry PMF not normalized");
        }
}

std::vector<int> label_crossing_states(const Crossings& crossings, const std::array<QuantileBins, 2>& duration_bins,
                                       int m) {
    int length = 0;
    for (const Segment& s : crossings.segments) length += s.duration;
    std::vector<int> labels(length, -1);
    for (std::size_t k = 0; k + 1 < crossings.segments.size(); ++k) {
        const Segment& s = crossings.segments[k];
        const int label = s.sign * m + duration_bins[s.sign].bin_of(s.duration);
        std::fill_n(labels.begin() + s.start, s.duration, label);
    }
    return labels;
}

MatrixFit fit_switch_matrix(std::span<const int> labels, std::span<const int> switch_indices, int m) {
    const int states = 2 * m;
    Matrix counts(states, std::vector<double>(states, 0.0));
    std::vector<double> entries(states, 0.0);
    for (int t : switch_indices) {
        if (t <= 0 || t >= static_cast<int>(labels.size())) continue;
        const int to = labels[t];
        if (to < 0) continue;
        entries[to] += 1.0;
        const int from = labels[t - 1];
        if (from >= 0 && from != to) counts[from][to] += 1.0;
    }
    MatrixFit out;
    out.matrix = counts;
    for (int i = 0; i < states; ++i) {
        auto& row = out.matrix[i];
        if (has_mass(row)) {
            normalize(row);
            continue;
        }
        out.flagged_rows.push_back(i);
        const int opposite = 1 - i / m;
        double total = 0.0;
        for (int b = 0; b < m; ++b) total += entries[opposite * m + b];
        for (int b = 0; b < m; ++b)
            row[opposite * m + b] = total > 0.0 ? entries[opposite * m + b] / total : 1.0 / m;
    }
    return out;
}

MatrixFit fit_compact_matrix(std::span<const int> labels, int num_states) {
    Matrix counts(num_states, std::vector<double>(num_states, 0.0));
    for (std::size_t t = 0; t + 1 < labels.size(); ++t)
        if (labels[t] >= 0 && labels[t + 1] >= 0) counts[labels[t]][labels[t + 1]] += 1.0;
    MatrixFit out;
    out.matrix = counts;
    for (int i = 0; i < num_states; ++i) {
        auto& row = out.matrix[i];
        if (has_mass(row)) {
            normalize(row);
        } else {
            out.flagged_rows.push_back(i);
            row[i] = 1.0;
        }
    }
    return out;
}

ErrorPmfFit fit_error_pmfs(std::span<const double> errors, std::span<const int> labels,
                           std::span<const int> switch_indices, const ModelHyperparams& hyper,
                           std::span<const int> conditions, int num_conditions) {
    if (errors.size() != labels.size()) throw InputError("errors and labels are not aligned");
    if (!conditions.empty() && conditions.size() != errors.size())
        throw InputError("conditions and errors are not aligned");
    if (num_conditions < 1) throw InputError("num_conditions must be >= 1");
    const int m = hyper.m;
    const int n = hyper.n;
    const int states = 2 * m;
    const ValueGrid& grid = hyper.grid;
    const int g = grid.size();
    auto condition_at = [&](std::size_t t) {
        if (conditions.empty()) return 0;
        const int c = conditions[t];
        if (c < 0 || c >= num_conditions) throw InputError("condition label out of range at index " + std::to_string(t));
        return c;
    };

    ErrorPmfFit out;
    std::vector<std::vector<double>> state_values(states);
    std::array<std::vector<double>, 2> sign_values;
    for (std::size_t t = 0; t < errors.size(); ++t) {
        if (labels[t] < 0) continue;
        state_values[labels[t]].push_back(errors[t]);
        sign_values[labels[t] / m].push_back(errors[t]);
    }
    out.error_bins.resize(states);
    for (int i = 0; i < states; ++i) {
        const auto& source = state_values[i].empty() ? sign_values[i / m] : state_values[i];
        if (source.empty()) throw TrainingError("no labelled errors for sign " + std::to_string(i / m));
        out.error_bins[i] = quantile_bins(source, n);
    }

    using Cells = std::vector<std::vector<std::vector<Pmf>>>;
    Cells stay_counts(num_conditions, std::vector<std::vector<Pmf>>(states, std::vector<Pmf>(n, Pmf(g, 0.0))));
    std::vector<std::vector<Pmf>> entry_counts(num_conditions, std::vector<Pmf>(states, Pmf(g, 0.0)));
    for (std::size_t t = 0; t + 1 < errors.size(); ++t) {
        const int i = labels[t];
        if (i < 0 || labels[t + 1] != i) continue;
        const int b = out.error_bins[i].bin_of(errors[t]);
        stay_counts[condition_at(t + 1)][i][b][grid.index_of(errors[t + 1])] += 1.0;
    }
    for (int t : switch_indices) {
        if (t <= 0 || t >= static_cast<int>(errors.size()) || labels[t] < 0) continue;
        entry_counts[condition_at(t)][labels[t]][grid.index_of(errors[t])] += 1.0;
    }

    // pooled levels of the fallback chain
    std::vector<std::vector<Pmf>> stay_state_bin(states, std::vector<Pmf>(n, Pmf(g, 0.0)));
    std::vector<Pmf> stay_state(states, Pmf(g, 0.0));
    std::array<Pmf, 2> stay_sign{Pmf(g, 0.0), Pmf(g, 0.0)};
    std::vector<Pmf> entry_state(states, Pmf(g, 0.0));
    std::array<Pmf, 2> entry_sign{Pmf(g, 0.0), Pmf(g, 0.0)};
    for (int c = 0; c < num_conditions; ++c)
        for (int i = 0; i < states; ++i) {
            for (int b = 0; b < n; ++b) {
                accumulate(stay_state_bin[i][b], stay_counts[c][i][b]);
                accumulate(stay_state[i], stay_counts[c][i][b]);
                accumulate(stay_sign[i / m], stay_counts[c][i][b]);
            }
            accumulate(entry_state[i], entry_counts[c][i]);
            accumulate(entry_sign[i / m], entry_counts[c][i]);
        }

    out.stay.assign(num_conditions, std::vector<std::vector<Pmf>>(states, std::vector<Pmf>(n)));
    out.entry.assign(num_conditions, std::vector<Pmf>(states));
    for (int c = 0; c < num_conditions; ++c)
        for (int i = 0; i < states; ++i) {
            const int sign = i / m;
            for (int b = 0; b < n; ++b) {
                const Pmf* chain[] = {&stay_counts[c][i][b], &stay_state_bin[i][b], &stay_state[i], &stay_sign[sign]};
                Pmf chosen;
                for (const Pmf* level : chain)
                    if (has_mass(*level)) {
                        chosen = normalized(*level);
                        break;
                    }
                if (chosen.empty()) chosen = point_mass(grid, smallest_magnitude_index(grid, sign));
                if (!has_mass(stay_counts[c][i][b])) ++out.stay_fallbacks;
                out.stay[c][i][b] = std::move(chosen);
            }
            const Pmf* chain[] = {&entry_counts[c][i], &entry_state[i], &entry_sign[sign], &stay_sign[sign]};
            Pmf chosen;
            for (const Pmf* level : chain)
                if (has_mass(*level)) {
                    chosen = normalized(*level);
                    break;
                }
            if (chosen.empty()) chosen = point_mass(grid, smallest_magnitude_index(grid, sign));
            if (!has_mass(entry_counts[c][i])) ++out.entry_fallbacks;
            out.entry[c][i] = std::move(chosen);
        }
    return out;
}

CrossingStateModel fit_crossing_model(std::span<const double> raw_errors, const ModelHyperparams& hyper,
                                      std::span<const int> conditions, int num_conditions) {
    hyper.validate();
    if (raw_errors.size() < 2) throw TrainingError("need at least 2 errors to fit a crossing model");
    const ValueGrid& grid = hyper.grid;
    if (!(grid.min <= 0.0 && grid.max > 0.0)) throw InputError("value grid must contain both signs");
    std::vector<double> errors(raw_errors.size());
    std::transform(raw_errors.begin(), raw_errors.end(), errors.begin(), [&](double e) { return grid.snap(e); });

    const Crossings crossings = extract_crossings(errors);
    std::array<std::vector<int>, 2> durations;
    for (std::size_t k = 0; k + 1 < crossings.segments.size(); ++k)
        durations[crossings.segments[k].sign].push_back(crossings.segments[k].duration);
    for (int s = 0; s < 2; ++s)
        if (durations[s].empty())
            throw TrainingError(std::string("no complete ") + (s == 1 ? "up" : "down") + "-crossings in training data");

    CrossingStateModel model;
    model.hyper = hyper;
    model.num_conditions = num_conditions;
    const int m = hyper.m;
    const int states = 2 * m;
    model.sojourn.resize(states);
    for (int s = 0; s < 2; ++s) {
        DurationBinning binning = quantize_durations(durations[s], m);
        const DurationCdf sign_level = empirical_duration_cdf(durations[s]);
        model.duration_bins[s] = binning.bins;
        for (int b = 0; b < m; ++b) {
            DurationCdf& cdf = model.sojourn[s * m + b];
            cdf = binning.cdfs[b];
            if (cdf.empty) {
                cdf = sign_level;
                model.diagnostics.empty_duration_bins.push_back(s * m + b);
            }
        }
    }
    model.diagnostics.closed_segments = static_cast<int>(durations[0].size() + durations[1].size());

    const std::vector<int> labels = label_crossing_states(crossings, model.duration_bins, m);
    std::vector<int> switches(crossings.up.begin(), crossings.up.end());
    switches.insert(switches.end(), crossings.down.begin(), crossings.down.end());
    std::sort(switches.begin(), switches.end());

    MatrixFit sw = fit_switch_matrix(labels, switches, m);
    model.switch_matrix = std::move(sw.matrix);
    model.diagnostics.flagged_switch_rows = std::move(sw.flagged_rows);
    MatrixFit compact = fit_compact_matrix(labels, states);
    model.compact_matrix = std::move(compact.matrix);
    model.diagnostics.flagged_compact_rows = std::move(compact.flagged_rows);

    ErrorPmfFit pmfs = fit_error_pmfs(errors, labels, switches, hyper, conditions, num_conditions);
    model.error_bins = std::move(pmfs.error_bins);
    model.stay = std::move(pmfs.stay);
    model.entry = std::move(pmfs.entry);
    model.diagnostics.stay_fallbacks = pmfs.stay_fallbacks;
    model.diagnostics.entry_fallbacks = pmfs.entry_fallbacks;

    model.state_occupancy.assign(states, 0.0);
    for (int label : labels)
        if (label >= 0) model.state_occupancy[label] += 1.0;
    normalize(model.state_occupancy);
    model.check_invariants();
    return model;
}

Pmf predictive_pmf_full(const CrossingStateModel& model, int state, int tau, int error_bin, int condition) {
    check_state(model, state);
    check_condition(model, condition);
    if (tau < 0) throw ContractViolation("running time must be >= 0");
    if (error_bin < 0 || error_bin >= model.n()) throw ContractViolation("error bin out of range");
    const double h = model.switch_probability(state, tau);
    Pmf out(model.grid().size(), 0.0);
    mix_into(out, 1.0 - h, model.stay[condition][state][error_bin]);
    if (h > 0.0)
        for (int j = 0; j < model.num_states(); ++j)
            if (j != state) mix_into(out, h * model.switch_matrix[state][j], model.entry[condition][j]);
    return out;
}

Pmf predictive_pmf_compact(const CrossingStateModel& model, int state, int error_bin, int condition) {
    check_state(model, state);
    check_condition(model, condition);
    if (error_bin < 0 || error_bin >= model.n()) throw ContractViolation("error bin out of range");
    Pmf out(model.grid().size(), 0.0);
    const auto& row = model.compact_matrix[state];
    mix_into(out, row[state], model.stay[condition][state][error_bin]);
    for (int j = 0; j < model.num_states(); ++j)
        if (j != state) mix_into(out, row[j], model.entry[condition][j]);
    return out;
}

int draw_index(std::span<const double> pmf, double u) {
    double acc = 0.0;
    int last = -1;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        if (pmf[k] <= 0.0) continue;
        last = static_cast<int>(k);
        acc += pmf[k];
        if (u < acc) return last;
    }
    if (last < 0) throw ContractViolation("draw from an empty PMF");
    return last;
}

namespace {

struct PathStart {
    int state;
    double error;
};

PathStart start_of_path(const CrossingStateModel& model, Rng& rng, std::span<const int> conditions,
                        std::optional<double> initial_error) {
    const int c0 = conditions.empty() ? 0 : conditions[0];
    if (initial_error) {
        const double e = model.grid().snap(*initial_error);
        const int state = model.state_index(crossing_sign(e), static_cast<int>(rng.below(model.m())));
        return {state, e};
    }
    const int state = rng.discrete(model.state_occupancy);
    const int k = draw_index(model.entry[c0][state], rng.uniform());
    return {state, model.grid().value(k)};
}

void check_sampling_args(const CrossingStateModel& model, int horizon, std::span<const int> conditions) {
    if (horizon <= 0) throw InputError("horizon must be positive");
    if (!conditions.empty() && static_cast<int>(conditions.size()) < horizon)
        throw InputError("condition labels shorter than the horizon");
    for (int c : conditions)
        if (c < 0 || c >= model.num_conditions) throw InputError("condition label out of range");
}

}  // namespace

SampledPath sample_path(const CrossingStateModel& model, int horizon, std::uint64_t seed,
                        std::span<const int> conditions, std::optional<double> initial_error, std::uint64_t stream) {
    check_sampling_args(model, horizon, conditions);
    Rng rng(seed, stream);
    SampledPath out;
    out.errors.reserve(horizon);
    out.states.reserve(horizon);
    out.taus.reserve(horizon);
    auto [state, error] = start_of_path(model, rng, conditions, initial_error);
    int tau = 0;
    const ValueGrid& grid = model.grid();
    for (int t = 0; t < horizon; ++t) {
        if (t > 0) {
            const int c = conditions.empty() ? 0 : conditions[t];
            const double h = model.switch_probability(state, tau);
            if (rng.uniform() < h) {
                state = rng.discrete(model.switch_matrix[state]);
                tau = 0;
                error = grid.value(draw_index(model.entry[c][state], rng.uniform()));
            } else {
                const int b = model.error_bin(state, error);
                error = grid.value(draw_index(model.stay[c][state][b], rng.uniform()));
                ++tau;
            }
        }
        out.errors.push_back(error);
        out.states.push_back(state);
        out.taus.push_back(tau);
    }
    return out;
}

SampledPath sample_path_compact(const CrossingStateModel& model, int horizon, std::uint64_t seed,
                                std::span<const int> conditions, std::optional<double> initial_error,
                                std::uint64_t stream) {
    check_sampling_args(model, horizon, conditions);
    Rng rng(seed, stream);
    SampledPath out;
    auto [state, error] = start_of_path(model, rng, conditions, initial_error);
    int tau = 0;
    const ValueGrid& grid = model.grid();
    for (int t = 0; t < horizon; ++t) {
        if (t > 0) {
            const int c = conditions.empty() ? 0 : conditions[t];
            const int next = rng.discrete(model.compact_matrix[state]);
            if (next == state) {
                error = grid.value(draw_index(model.stay[c][state][model.error_bin(state, error)], rng.uniform()));
                ++tau;
            } else {
                state = next;
                error = grid.value(draw_index(model.entry[c][state], rng.uniform()));
                tau = 0;
            }
        }
        out.errors.push_back(error);
        out.states.push_back(state);
        out.taus.push_back(tau);
    }
    return out;
}

}  // namespace hsadp
