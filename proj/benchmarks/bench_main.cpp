#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsadp/belief.hpp"
#include "hsadp/data_io.hpp"
#include "hsadp/dp_solvers.hpp"
#include "hsadp/price_model.hpp"

using namespace hsadp;

namespace {

const std::filesystem::path kToy = std::filesystem::path(HSADP_SOURCE_DIR) / "data" / "toy";

SyntheticData& synthetic() {
    static SyntheticData data = [] {
        SyntheticSpec spec;
        spec.days = 60;
        spec.seed = 3;
        return generate_synthetic(spec);
    }();
    return data;
}

StoredModel& wind_model() {
    static StoredModel m = [] {
        StoredModel s;
        s.kind = "hsmm-wind";
        s.grid = ValueGrid{-5000.0, 5000.0, 100.0};
        s.hsmm = fit_crossing_model(compute_errors(synthetic().wind), ModelHyperparams{2, 2, s.grid});
        return s;
    }();
    return m;
}

StoredModel& price_model() {
    static StoredModel m = [] {
        StoredModel s;
        s.kind = "hsmm-price";
        s.grid = ValueGrid{-40.0, 140.0, 4.0};
        s.hsmm = fit_price_model(synthetic().price, ModelHyperparams{1, 3, s.grid});
        return s;
    }();
    return m;
}

StorageMdp toy_mdp() {
    Instance inst = load_instance(kToy / "instance.json");
    complete_scenario(inst, price_model());
    StorageMdp mdp;
    mdp.spec = inst.spec;
    mdp.scenario = inst.scenario;
    mdp.wind = make_process(wind_model());
    mdp.price = make_process(price_model());
    mdp.validate();
    return mdp;
}

void BM_ParseTrainingCsv(benchmark::State& state) {
    SyntheticSpec spec;
    spec.days = 348;
    std::ostringstream text;
    TrainingSeries series = generate_synthetic(spec).wind;
    series.timestamps.resize(100000);
    series.actual.resize(100000);
    series.reference.resize(100000);
    write_training_csv(text, series);
    const std::string csv = text.str();
    for (auto _ : state) {
        std::istringstream in(csv);
        benchmark::DoNotOptimize(parse_training_csv(in));
    }
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_ParseTrainingCsv)->Unit(benchmark::kMillisecond);

void BM_BayesUpdate(benchmark::State& state) {
    const CrossingStateModel& m = wind_model().hsmm;
    const std::vector<double> errors = sample_path(m, 4096, 9).errors;
    KnowledgeState k = init_belief(m, errors[0]);
    std::size_t i = 1;
    for (auto _ : state) {
        k = bayes_update(m, k, errors[i]);
        i = i + 1 < errors.size() ? i + 1 : 1;
        benchmark::DoNotOptimize(k.probs.data());
    }
}
BENCHMARK(BM_BayesUpdate);

void BM_ExactDp(benchmark::State& state) {
    const StorageMdp mdp = toy_mdp();
    SolverConfig cfg;
    cfg.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(exact_backward_dp(mdp, cfg));
}
BENCHMARK(BM_ExactDp)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BadpLookup(benchmark::State& state) {
    const StorageMdp mdp = toy_mdp();
    SolverConfig cfg;
    cfg.alpha = 0.1;
    for (auto _ : state) benchmark::DoNotOptimize(badp_lookup(mdp, cfg));
}
BENCHMARK(BM_BadpLookup)->Unit(benchmark::kMillisecond);

void BM_BadpLinear(benchmark::State& state) {
    const StorageMdp mdp = toy_mdp();
    const StandardBasis basis;
    SolverConfig cfg;
    cfg.alpha = 0.1;
    for (auto _ : state) benchmark::DoNotOptimize(badp_linear(mdp, cfg, basis));
}
BENCHMARK(BM_BadpLinear)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
