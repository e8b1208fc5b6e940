#include "hsadp/exogenous.hpp"

#include <algorithm>
#include <cmath>

#include "hsadp/errors.hpp"

namespace hsadp {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<Successor> pmf_successors(const Pmf& pmf, int tag) {
    std::vector<Successor> out;
    for (int k = 0; k < static_cast<int>(pmf.size()); ++k)
        if (pmf[k] > 0.0) out.push_back({k, tag, pmf[k]});
    return out;
}

Pmf mixture(const Pmf& a, double wa, const Pmf& b, double wb) {
    Pmf out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = wa * a[k] + wb * b[k];
    return out;
}

}  // namespace

Pmf discretized_normal(const ValueGrid& grid, double mean, double sd) {
    const int size = grid.size();
    Pmf out(size, 0.0);
    if (!(sd > 0.0)) {
        out[grid.index_of(mean)] = 1.0;
        return out;
    }
    const double half = 0.5 * grid.step;
    for (int k = 0; k < size; ++k) {
        const double lo = k == 0 ? 0.0 : normal_cdf((grid.value(k) - half - mean) / sd);
        const double hi = k == size - 1 ? 1.0 : normal_cdf((grid.value(k) + half - mean) / sd);
        out[k] = std::max(hi - lo, 0.0);
    }
    for (double& p : out)
        if (p < 1e-12) p = 0.0;
    if (pmf_total(out) <= 0.0) out[grid.index_of(mean)] = 1.0;
    normalize(out);
    return out;
}

HsmmProcess::HsmmProcess(CrossingStateModel model) : model_(std::move(model)) {
    const int n = model_.n();
    const int states = model_.num_states();
    succ_.resize(model_.num_conditions);
    for (int c = 0; c < model_.num_conditions; ++c) {
        succ_[c].resize(states * n);
        for (int i = 0; i < states; ++i)
            for (int b = 0; b < n; ++b) {
                std::vector<Successor> list;
                const auto& row = model_.compact_matrix[i];
                for (int j = 0; j < states; ++j) {
                    if (row[j] == 0.0) continue;
                    const Pmf& pmf = j == i ? model_.stay[c][i][b] : model_.entry[c][j];
                    for (int k = 0; k < static_cast<int>(pmf.size()); ++k)
                        if (pmf[k] > 0.0) list.push_back({k, model_.bin_of_state(j), row[j] * pmf[k]});
                }
                std::sort(list.begin(), list.end(), [](const Successor& a, const Successor& b) {
                    return a.value != b.value ? a.value < b.value : a.tag < b.tag;
                });
                succ_[c][i * n + b] = std::move(list);
            }
    }
}

int HsmmProcess::info_state(int value, int tag) const {
    if (tag < 0 || tag >= model_.m() || value < 0 || value >= grid().size()) return -1;
    const double e = grid().value(value);
    const int i = model_.state_index(crossing_sign(e), tag);
    return i * model_.n() + model_.error_bin(i, e);
}

std::span<const Successor> HsmmProcess::successors(int info, int condition) const {
    return succ_[condition_for(condition)][info];
}

KnowledgeState HsmmProcess::initial_knowledge(double error) const { return init_belief(model_, error); }

KnowledgeState HsmmProcess::update_knowledge(const KnowledgeState& k, double error, int condition) const {
    return bayes_update(model_, k, error, condition_for(condition));
}

std::vector<std::pair<int, double>> HsmmProcess::info_distribution(const KnowledgeState& k) const {
    std::vector<std::pair<int, double>> out;
    for (int i = 0; i < model_.num_states(); ++i)
        if (k.probs[i] > 0.0) out.emplace_back(i * model_.n() + model_.error_bin(i, k.last_error), k.probs[i]);
    return out;
}

double HsmmProcess::crossing_feature(int value, int tag) const {
    return (crossing_sign(grid().value(value)) - 0.5) * (tag + 1);
}

double HsmmProcess::expected_crossing_feature(const KnowledgeState& k) const {
    double out = 0.0;
    for (int i = 0; i < model_.num_states(); ++i)
        out += k.probs[i] * (model_.sign_of_state(i) - 0.5) * (model_.bin_of_state(i) + 1);
    return out;
}

std::vector<double> HsmmProcess::sample(int length, std::uint64_t seed, std::uint64_t stream, double initial,
                                        std::span<const int> conditions, bool compact) const {
    std::vector<int> mapped;
    if (!conditions.empty()) {
        mapped.reserve(conditions.size());
        for (int c : conditions) mapped.push_back(condition_for(c));
    }
    auto path = compact ? sample_path_compact(model_, length, seed, mapped, initial, stream)
                        : sample_path(model_, length, seed, mapped, initial, stream);
    return std::move(path.errors);
}

std::span<const Successor> ObservedProcess::successors(int info, int) const { return succ_[info]; }

KnowledgeState ObservedProcess::initial_knowledge(double error) const {
    KnowledgeState k;
    k.probs = {1.0};
    k.last_error = grid_.snap(error);
    return k;
}

KnowledgeState ObservedProcess::update_knowledge(const KnowledgeState& k, double error, int) const {
    KnowledgeState out = k;
    const double e = grid_.snap(error);
    out.tau = crossing_sign(e) == crossing_sign(k.last_error) ? k.tau + 1 : 0;
    out.last_error = e;
    return out;
}

std::vector<std::pair<int, double>> ObservedProcess::info_distribution(const KnowledgeState& k) const {
    return {{info_state(grid_.index_of(k.last_error), 0), 1.0}};
}

double ObservedProcess::crossing_feature(int value, int) const { return crossing_sign(grid_.value(value)) - 0.5; }

double ObservedProcess::expected_crossing_feature(const KnowledgeState& k) const {
    return crossing_sign(k.last_error) - 0.5;
}

Ar1Process::Ar1Process(Ar1Params params, ValueGrid grid) : params_(params) {
    params_.validate();
    grid.validate();
    grid_ = grid;
    succ_.resize(grid_.size());
    for (int v = 0; v < grid_.size(); ++v)
        succ_[v] = pmf_successors(discretized_normal(grid_, params_.gamma * grid_.value(v), params_.resid_std), 0);
}

std::vector<double> Ar1Process::sample(int length, std::uint64_t seed, std::uint64_t stream, double initial,
                                       std::span<const int>, bool) const {
    return sample_ar1(params_, length, seed, initial, grid_, stream);
}

MrjdProcess::MrjdProcess(MrjdParams params, ValueGrid grid) : params_(params) {
    params_.validate();
    grid.validate();
    grid_ = grid;
    succ_.resize(grid_.size());
    const double wide = std::sqrt(params_.base_std * params_.base_std + params_.jump_std * params_.jump_std);
    for (int v = 0; v < grid_.size(); ++v) {
        const double mean = params_.gamma * grid_.value(v);
        Pmf pmf = mixture(discretized_normal(grid_, mean, params_.base_std), 1.0 - params_.jump_prob,
                          discretized_normal(grid_, mean, wide), params_.jump_prob);
        normalize(pmf);
        succ_[v] = pmf_successors(pmf, 0);
    }
}

std::vector<double> MrjdProcess::sample(int length, std::uint64_t seed, std::uint64_t stream, double initial,
                                        std::span<const int>, bool) const {
    return sample_mrjd(params_, length, seed, initial, grid_, stream);
}

MarkovChainProcess::MarkovChainProcess(MarkovChainParams params) : params_(std::move(params)) {
    grid_ = params_.grid;
    for (const Pmf& pmf : params_.successor) succ_.push_back(pmf_successors(pmf, 0));
}

std::vector<double> MarkovChainProcess::sample(int length, std::uint64_t seed, std::uint64_t stream,
                                               double initial, std::span<const int>, bool) const {
    return sample_markov_chain(params_, length, seed, initial, stream);
}

int MarkovChainProcess::info_state(int value, int tag) const {
    if (tag != 0) return -1;
    return params_.bins.bin_of(grid_.value(value));
}

}  // namespace hsadp
