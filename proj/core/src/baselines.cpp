#include "hsadp/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "hsadp/crossing_model.hpp"
#include "hsadp/errors.hpp"
#include "hsadp/rng.hpp"

namespace hsadp {

namespace {

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + mid));
}

double lag_one_gamma(std::span<const double> e) {
    KahanSum num;
    KahanSum den;
    for (std::size_t t = 1; t < e.size(); ++t) {
        num.add(e[t] * e[t - 1]);
        den.add(e[t - 1] * e[t - 1]);
    }
    return den.value() > 0.0 ? num.value() / den.value() : 0.0;
}

std::vector<double> residuals(std::span<const double> e, double gamma) {
    std::vector<double> r;
    r.reserve(e.size() - 1);
    for (std::size_t t = 1; t < e.size(); ++t) r.push_back(e[t] - gamma * e[t - 1]);
    return r;
}

double rms(std::span<const double> v) {
    if (v.empty()) return 0.0;
    KahanSum s;
    for (double x : v) s.add(x * x);
    return std::sqrt(s.value() / static_cast<double>(v.size()));
}

}  // namespace

void Ar1Params::validate() const {
    if (!(resid_std >= 0.0)) throw InputError("AR(1) residual std must be >= 0");
}

void MrjdParams::validate() const {
    if (!(base_std >= 0.0) || !(jump_std >= 0.0)) throw InputError("MRJD standard deviations must be >= 0");
    if (!(jump_prob >= 0.0 && jump_prob <= 1.0)) throw InputError("MRJD jump probability must be in [0,1]");
}

Ar1Params fit_ar1(std::span<const double> errors) {
    if (errors.size() < 2) throw TrainingError("AR(1) fit needs at least 2 points");
    Ar1Params p;
    p.gamma = lag_one_gamma(errors);
    p.resid_std = rms(residuals(errors, p.gamma));
    return p;
}

std::vector<double> sample_ar1(const Ar1Params& params, int horizon, std::uint64_t seed, double initial,
                               const std::optional<ValueGrid>& grid, std::uint64_t stream) {
    params.validate();
    if (horizon <= 0) throw InputError("horizon must be positive");
    Rng base(seed, stream, 0);
    std::vector<double> out(horizon);
    double x = grid ? grid->snap(initial) : initial;
    out[0] = x;
    for (int t = 1; t < horizon; ++t) {
        x = params.gamma * x + params.resid_std * base.normal();
        if (grid) x = grid->snap(x);
        out[t] = x;
    }
    return out;
}

MrjdParams fit_mrjd(std::span<const double> errors) {
    if (errors.size() < 2) throw TrainingError("MRJD fit needs at least 2 points");
    MrjdParams p;
    p.gamma = lag_one_gamma(errors);
    const std::vector<double> r = residuals(errors, p.gamma);
    const double center = median(r);
    std::vector<double> dev(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) dev[k] = std::abs(r[k] - center);
    const double scale = 1.4826 * median(dev);
    std::vector<double> base;
    std::vector<double> jumps;
    for (double x : r) (scale > 0.0 && std::abs(x - center) > 3.0 * scale ? jumps : base).push_back(x);
    p.base_std = rms(base);
    p.jump_prob = static_cast<double>(jumps.size()) / static_cast<double>(r.size());
    if (!jumps.empty()) {
        const double jump_var = rms(jumps) * rms(jumps) - p.base_std * p.base_std;
        p.jump_std = std::sqrt(std::max(jump_var, 0.0));
    }
    return p;
}

std::vector<double> sample_mrjd(const MrjdParams& params, int horizon, std::uint64_t seed, double initial,
                                const std::optional<ValueGrid>& grid, std::uint64_t stream) {
    params.validate();
    if (horizon <= 0) throw InputError("horizon must be positive");
    Rng base(seed, stream, 0);
    Rng jump(seed, stream, 1);
    std::vector<double> out(horizon);
    double x = grid ? grid->snap(initial) : initial;
    out[0] = x;
    for (int t = 1; t < horizon; ++t) {
        const double noise = params.base_std * base.normal();
        const double u = jump.uniform();
        const double j = params.jump_std * jump.normal();
        x = params.gamma * x + noise + (u < params.jump_prob ? j : 0.0);
        if (grid) x = grid->snap(x);
        out[t] = x;
    }
    return out;
}

MarkovChainParams fit_markov_chain(std::span<const double> errors, int bins, const ValueGrid& grid) {
    grid.validate();
    if (errors.size() < 2) throw TrainingError("Markov chain fit needs at least 2 points");
    MarkovChainParams p;
    p.grid = grid;
    std::vector<double> previous(errors.begin(), errors.end() - 1);
    for (double& v : previous) v = grid.snap(v);
    p.bins = quantile_bins(previous, bins);
    std::vector<std::vector<double>> successors(p.bins.bins());
    std::vector<double> all;
    for (std::size_t t = 1; t < errors.size(); ++t) {
        successors[p.bins.bin_of(previous[t - 1])].push_back(errors[t]);
        all.push_back(errors[t]);
    }
    p.marginal = histogram_pmf(all, grid);
    for (const auto& s : successors) p.successor.push_back(s.empty() ? p.marginal : histogram_pmf(s, grid));
    return p;
}

std::vector<double> sample_markov_chain(const MarkovChainParams& params, int horizon, std::uint64_t seed,
                                        double initial, std::uint64_t stream) {
    if (horizon <= 0) throw InputError("horizon must be positive");
    Rng rng(seed, stream);
    std::vector<double> out(horizon);
    double x = params.grid.snap(initial);
    out[0] = x;
    for (int t = 1; t < horizon; ++t) {
        x = params.grid.value(draw_index(params.successor[params.bins.bin_of(x)], rng.uniform()));
        out[t] = x;
    }
    return out;
}

}  // namespace hsadp
