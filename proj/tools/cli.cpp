#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hsadp/crossings.hpp"
#include "hsadp/data_io.hpp"
#include "hsadp/dp_solvers.hpp"
#include "hsadp/errors.hpp"
#include "hsadp/parallel.hpp"
#include "hsadp/price_model.hpp"
#include "hsadp/rng.hpp"

namespace hsadp::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Instance with its models, ready to simulate or solve.
struct Bundle {
    Instance instance;
    StoredModel wind;
    StoredModel price;
    StorageMdp mdp;
};

Bundle load_bundle(const fs::path& instance, const fs::path& wind_model, const fs::path& price_model) {
    Bundle b;
    b.instance = load_instance(instance);
    b.wind = load_model(wind_model);
    b.price = load_model(price_model);
    complete_scenario(b.instance, b.price);
    b.mdp.spec = b.instance.spec;
    b.mdp.scenario = b.instance.scenario;
    b.mdp.wind = make_process(b.wind);
    b.mdp.price = make_process(b.price);
    b.mdp.validate();
    return b;
}

std::string relative_to(const fs::path& artifact, const fs::path& target) {
    const fs::path base = fs::absolute(artifact).parent_path();
    return fs::relative(fs::absolute(target), base).generic_string();
}

fs::path resolve(const fs::path& artifact, const std::string& rel) {
    return (fs::absolute(artifact).parent_path() / rel).lexically_normal();
}

SolveRecord base_record(const fs::path& out, const fs::path& instance, const fs::path& wind,
                        const fs::path& price, const Globals& g) {
    SolveRecord r;
    r.seed = g.seed;
    r.instance = relative_to(out, instance);
    r.wind_model = relative_to(out, wind);
    r.price_model = relative_to(out, price);
    r.wind_model_hash = artifact_hash(wind);
    r.price_model_hash = artifact_hash(price);
    return r;
}

TerminalRule parse_terminal(const std::string& s) {
    if (s == "zero") return TerminalRule::Zero;
    if (s == "salvage") return TerminalRule::Salvage;
    throw InputError("terminal must be zero or salvage");
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

/// Policy artifact resolved against an instance.
struct LoadedPolicy {
    std::string name;
    PolicyPtr policy;
    std::shared_ptr<Bundle> bundle;
};

LoadedPolicy load_policy(const fs::path& path, const std::optional<fs::path>& instance_override, int threads) {
    const std::string kind = artifact_kind(path);
    SolveRecord record;
    LookupVFA lookup;
    LinearVFA linear;
    PfaParams pfa;
    if (kind == "lookup_vfa") {
        lookup = load_lookup_vfa(path, &record);
    } else if (kind == "linear_vfa") {
        linear = load_linear_vfa(path, &record);
    } else if (kind == "pfa") {
        pfa = load_pfa(path, &record);
    } else {
        throw InputError(path.string() + " is a " + kind + ", not a policy artifact");
    }
    const fs::path wind = resolve(path, record.wind_model);
    const fs::path price = resolve(path, record.price_model);
    if (artifact_hash(wind) != record.wind_model_hash || artifact_hash(price) != record.price_model_hash)
        throw PersistenceError(path.string() + ": referenced model changed since the policy was built");
    const fs::path instance = instance_override ? *instance_override : resolve(path, record.instance);

    LoadedPolicy lp;
    lp.name = path.stem().string();
    lp.bundle = std::make_shared<Bundle>(load_bundle(instance, wind, price));
    const StorageMdp& mdp = lp.bundle->mdp;
    if (kind == "lookup_vfa") {
        if (lookup.horizon() != mdp.horizon() || lookup.levels() != mdp.num_levels() ||
            lookup.wind_info() != mdp.wind->num_info_states() || lookup.price_info() != mdp.price->num_info_states())
            throw InputError(path.string() + ": table shape does not match the instance and models");
        lp.policy = std::make_shared<LookupPolicy>(std::make_shared<const LookupVFA>(std::move(lookup)), lp.name);
    } else if (kind == "linear_vfa") {
        if (static_cast<int>(linear.theta.size()) != mdp.horizon() + 1)
            throw InputError(path.string() + ": coefficient count does not match the horizon");
        if (linear.feature_space == "post")
            lp.policy = std::make_shared<PostFeaturePolicy>(linear, lp.name);
        else
            lp.policy = make_linear_policy(mdp, linear, parse_terminal(record.terminal), lp.name, threads);
    } else {
        lp.policy = std::make_shared<PfaPolicy>(pfa);
    }
    return lp;
}

/// Windows of T+1 actual prices starting at the instance's time of day.
std::vector<std::vector<double>> price_pool(const TrainingSeries& prices, const Instance& inst) {
    const int length = inst.scenario.horizon + 1;
    std::vector<std::vector<double>> days;
    const int offset = ((inst.first_slot - prices.first_slot()) % kStepsPerDay + kStepsPerDay) % kStepsPerDay;
    for (std::size_t s = offset; s + length <= prices.size(); s += kStepsPerDay)
        days.emplace_back(prices.actual.begin() + s, prices.actual.begin() + s + length);
    if (days.empty()) throw InputError("price data holds no window of " + std::to_string(length) + " points");
    return days;
}

std::vector<int> tile(std::span<const int> v, std::size_t n) {
    std::vector<int> out(n, 0);
    if (v.empty()) return out;
    for (std::size_t i = 0; i < n; ++i) out[i] = v[i % v.size()];
    return out;
}

double standard_error(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    KahanSum s;
    for (double x : v) s.add(x);
    const double mean = s.value() / static_cast<double>(v.size());
    KahanSum ss;
    for (double x : v) ss.add((x - mean) * (x - mean));
    return std::sqrt(ss.value() / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

void cmd_gen_data(const std::string& spec_path, const fs::path& out_dir, std::ostream& out) {
    std::ifstream in(spec_path);
    if (!in) throw InputError("cannot open " + spec_path);
    std::stringstream text;
    text << in.rdbuf();
    const SyntheticData data = generate_synthetic(parse_synthetic_spec(text.str()));
    fs::create_directories(out_dir);
    {
        auto f = open_out(out_dir / "wind.csv");
        write_training_csv(f, data.wind);
    }
    {
        auto f = open_out(out_dir / "price.csv");
        write_training_csv(f, data.price);
    }
    auto f = open_out(out_dir / "ground_truth.json");
    f << data.ground_truth_json << '\n';
    out << "wrote " << data.wind.size() << " steps to " << out_dir.string() << '\n';
}

struct TrainArgs {
    std::string kind;
    std::string input;
    int m = 1;
    int n = 1;
    double grid_min = 0.0;
    double grid_max = 0.0;
    double grid_step = 1.0;
    std::string out;
};

void cmd_train(const TrainArgs& a, std::ostream& out) {
    const TrainingSeries series = load_training_csv(a.input);
    StoredModel model;
    model.kind = a.kind;
    model.grid = {a.grid_min, a.grid_max, a.grid_step};
    model.grid.validate();
    const ModelHyperparams hyper{a.m, a.n, model.grid};
    if (a.kind == "hsmm-wind") {
        model.hsmm = fit_crossing_model(compute_errors(series), hyper);
    } else if (a.kind == "hsmm-price") {
        model.hsmm = fit_price_model(series, hyper);
    } else if (a.kind == "ar1") {
        model.ar1 = fit_ar1(compute_errors(series));
    } else if (a.kind == "mrjd") {
        model.mrjd = fit_mrjd(compute_errors(series));
    } else if (a.kind == "markov") {
        model.markov = fit_markov_chain(compute_errors(series), a.n, model.grid);
    } else {
        throw InputError("unknown model kind '" + a.kind + "'");
    }
    save_model(a.out, model);
    out << "model kind=" << a.kind << " hash=" << artifact_hash(a.out) << '\n';
}

void cmd_validate(const std::string& model_path, const std::string& input, const fs::path& out_dir,
                  const Globals& g, std::ostream& out) {
    const StoredModel model = load_model(model_path);
    const TrainingSeries series = load_training_csv(input);
    std::vector<double> errors;
    std::vector<int> conditions;
    if (model.kind == "hsmm-price") {
        errors = price_errors(model.hsmm, series);
        if (series.has_temperature()) conditions = price_conditions(model.hsmm, series.temperature);
    } else {
        errors = compute_errors(series);
    }
    for (double& e : errors) e = model.grid.snap(e);
    const int length = std::max<int>(100000, static_cast<int>(errors.size()));
    const ProcessPtr process = make_process(model);
    const std::vector<double> sampled =
        process->sample(length, g.seed, 0, errors.front(), tile(conditions, static_cast<std::size_t>(length)));

    const CrossingTimeCdfs train = crossing_time_cdf(errors);
    const CrossingTimeCdfs fitted = crossing_time_cdf(sampled);
    const double ks_up = ks_statistic(train.up, fitted.up);
    const double ks_down = ks_statistic(train.down, fitted.down);

    fs::create_directories(out_dir);
    auto ks = open_out(out_dir / "ks.csv");
    ks << "direction,training_runs,model_runs,ks\n";
    ks << "up," << train.up_durations.size() << ',' << fitted.up_durations.size() << ',' << format_number(ks_up)
       << '\n';
    ks << "down," << train.down_durations.size() << ',' << fitted.down_durations.size() << ','
       << format_number(ks_down) << '\n';
    auto cdf = open_out(out_dir / "crossing_cdf.csv");
    cdf << "direction,duration,training,model\n";
    for (int dir = 0; dir < 2; ++dir) {
        const DurationCdf& ta = dir == 0 ? train.up : train.down;
        const DurationCdf& tb = dir == 0 ? fitted.up : fitted.down;
        const int max_d = std::max(ta.max_duration(), tb.max_duration());
        for (int d = 1; d <= max_d; ++d)
            cdf << (dir == 0 ? "up," : "down,") << d << ',' << format_number(ta.at(d)) << ','
                << format_number(tb.at(d)) << '\n';
    }
    out << "ks up=" << format_number(ks_up) << " down=" << format_number(ks_down) << '\n';
}

struct SolveArgs {
    std::string method;
    double alpha = 1.0;
    std::string instance;
    std::string wind_model;
    std::string price_model;
    std::string out;
    std::string terminal = "zero";
    std::string basis = "standard";
    std::string loss = "squared";
    std::size_t max_entries = std::size_t{1} << 28;
    int api_iterations = 4;
    int api_paths = 40;
    int api_validation_paths = 20;
    double api_budget = 600.0;
};

void cmd_solve(const SolveArgs& a, const Globals& g, std::ostream& out) {
    const Bundle b = load_bundle(a.instance, a.wind_model, a.price_model);
    SolverConfig config;
    config.alpha = a.alpha;
    config.terminal = parse_terminal(a.terminal);
    if (a.loss == "squared")
        config.loss = Loss::Squared;
    else if (a.loss == "absolute")
        config.loss = Loss::Absolute;
    else
        throw InputError("loss must be squared or absolute");
    config.seed = g.seed;
    config.threads = g.threads;
    config.max_table_entries = a.max_entries;
    config.progress = [&](const SolveProgress& p) {
        out << "progress method=" << a.method << " t=" << p.t << " seconds=" << format_number(p.seconds)
            << " evaluated=" << p.evaluated_states << " entries=" << p.table_entries << '\n';
    };
    config.validate();

    SolveRecord record = base_record(a.out, a.instance, a.wind_model, a.price_model, g);
    record.method = a.method;
    record.alpha = a.alpha;
    record.terminal = a.terminal;
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    if (a.method == "exact" || a.method == "badp-lookup") {
        const LookupVFA vfa = a.method == "exact" ? exact_backward_dp(b.mdp, config) : badp_lookup(b.mdp, config);
        record.seconds = elapsed();
        save_lookup_vfa(a.out, vfa, record);
    } else if (a.method == "badp-linear") {
        const auto basis = make_basis(a.basis, b.mdp);
        const LinearVFA vfa = badp_linear(b.mdp, config, *basis);
        record.seconds = elapsed();
        save_linear_vfa(a.out, vfa, record);
    } else if (a.method == "api") {
        ApiConfig api;
        api.iterations = a.api_iterations;
        api.paths_per_iteration = a.api_paths;
        api.validation_paths = a.api_validation_paths;
        api.time_budget_seconds = a.api_budget;
        api.seed = g.seed;
        api.threads = g.threads;
        const ApiResult result = api_train(b.mdp, api);
        for (std::size_t i = 0; i < result.validation_mean.size(); ++i)
            out << "progress method=api iteration=" << i
                << " validation_mean=" << format_number(result.validation_mean[i]) << '\n';
        record.seconds = elapsed();
        save_linear_vfa(a.out, result.vfa, record);
    } else {
        throw InputError("unknown method '" + a.method + "'");
    }
    out << "solved method=" << a.method << " seconds=" << format_number(record.seconds) << " out=" << a.out << '\n';
}

struct ScenarioArgs {
    std::string kind = "typ";
    std::string instance;
    std::string wind_model;
    std::string price_model;
    int count = 100;
    bool compact = false;
    std::string typical;
    std::string price_data;
    std::string out;
};

void cmd_scenarios(const ScenarioArgs& a, const Globals& g, std::ostream& out) {
    const Bundle b = load_bundle(a.instance, a.wind_model, a.price_model);
    ScenarioSet set;
    if (a.kind == "typ") {
        set = build_typical_set(*b.mdp.wind, *b.mdp.price, b.mdp.scenario, a.count, g.seed, a.compact);
        if (a.compact) set.label = "Typ-compact";
    } else if (a.kind == "wc") {
        if (a.typical.empty() || a.price_data.empty()) throw InputError("wc needs --typical and --price-data");
        const ScenarioSet typical = load_scenario_set(a.typical);
        const TrainingSeries prices = load_training_csv(a.price_data);
        set = build_worst_case_set(typical, b.mdp.scenario, price_pool(prices, b.instance), g.seed);
    } else {
        throw InputError("scenario kind must be typ or wc");
    }
    save_scenario_set(a.out, set);
    out << "scenarios label=" << set.label << " paths=" << set.paths.size() << " hash=" << artifact_hash(a.out)
        << '\n';
}

struct TuneArgs {
    std::string instance;
    std::string wind_model;
    std::string price_model;
    std::string scenarios;
    int grid_points = 20;
    std::string out;
};

void cmd_tune_pfa(const TuneArgs& a, const Globals& g, std::ostream& out) {
    const Bundle b = load_bundle(a.instance, a.wind_model, a.price_model);
    const ScenarioSet set = load_scenario_set(a.scenarios);
    set.validate(b.mdp.horizon() + 1);
    std::vector<double> prices;
    for (const auto& p : set.paths)
        for (int t = 0; t <= b.mdp.horizon(); ++t) prices.push_back(b.mdp.scenario.price_at(t, p.price_error[t]));
    const PfaTuning tuning = tune_pfa(b.mdp, set, default_pfa_grid(prices, a.grid_points), g.threads);
    SolveRecord record = base_record(a.out, a.instance, a.wind_model, a.price_model, g);
    record.method = "pfa";
    save_pfa(a.out, tuning.best, record, artifact_hash(a.scenarios));
    out << "pfa theta_h=" << format_number(tuning.best.theta_h) << " theta_l=" << format_number(tuning.best.theta_l)
        << " mean=" << format_number(tuning.best_mean) << " evaluated=" << tuning.evaluated.size() << '\n';
}

void cmd_simulate(const std::string& policy_path, const std::string& scenarios, const fs::path& out_dir,
                  const std::string& instance, int max_traces, const Globals& g, std::ostream& out) {
    std::optional<fs::path> override;
    if (!instance.empty()) override = instance;
    const LoadedPolicy lp = load_policy(policy_path, override, g.threads);
    const ScenarioSet set = load_scenario_set(scenarios);
    const StorageMdp& mdp = lp.bundle->mdp;
    set.validate(mdp.horizon() + 1);
    std::vector<RolloutTrace> traces(set.paths.size());
    parallel_for(set.paths.size(), g.threads,
                 [&](std::size_t i) { traces[i] = simulate_policy(*lp.policy, mdp, set.paths[i]); });
    fs::create_directories(out_dir);
    auto metrics = open_out(out_dir / "metrics.csv");
    metrics << "path,contribution,shifted_profit\n";
    std::vector<double> raw, shifted;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        metrics << i << ',' << format_number(traces[i].total) << ',' << format_number(traces[i].total_shifted) << '\n';
        raw.push_back(traces[i].total);
        shifted.push_back(traces[i].total_shifted);
        if (static_cast<int>(i) < max_traces) {
            char name[32];
            std::snprintf(name, sizeof name, "trace_%03zu.csv", i);
            auto f = open_out(out_dir / name);
            write_trace_csv(f, traces[i]);
        }
    }
    KahanSum r, s;
    for (double v : raw) r.add(v);
    for (double v : shifted) s.add(v);
    const double n = std::max<double>(1.0, static_cast<double>(raw.size()));
    out << "simulated policy=" << lp.name << " paths=" << raw.size() << " mean_contribution="
        << format_number(r.value() / n) << " mean_shifted_profit=" << format_number(s.value() / n) << '\n';
}

void cmd_compare(const std::string& instance, const std::vector<std::string>& policies,
                 const std::vector<std::string>& sets, const std::string& out_path, const Globals& g,
                 std::ostream& out) {
    if (policies.empty() || sets.empty()) throw InputError("compare needs at least one policy and one scenario set");
    std::vector<LoadedPolicy> loaded;
    for (const auto& p : policies) loaded.push_back(load_policy(p, fs::path(instance), g.threads));
    std::map<std::string, int> seen;
    for (auto& lp : loaded)
        if (seen[lp.name]++ > 0) lp.name += "_" + std::to_string(seen[lp.name] - 1);
    for (std::size_t i = 1; i < loaded.size(); ++i) {
        const Scenario& a = loaded[0].bundle->mdp.scenario;
        const Scenario& b = loaded[i].bundle->mdp.scenario;
        if (a.price_reference != b.price_reference || a.price_conditions != b.price_conditions)
            throw InputError(loaded[i].name + " uses a price model whose reference differs from the benchmark's");
    }
    std::vector<ResultRow> rows;
    for (const auto& set_path : sets) {
        const ScenarioSet set = load_scenario_set(set_path);
        std::vector<ProfitSummary> results;
        for (const auto& lp : loaded) {
            set.validate(lp.bundle->mdp.horizon() + 1);
            results.push_back(evaluate_profit(*lp.policy, lp.bundle->mdp, set, g.threads));
        }
        for (std::size_t i = 0; i < loaded.size(); ++i) {
            ResultRow row;
            row.policy = loaded[i].name;
            row.scenario_set = set.label;
            row.percent_of_optimal = percent_of_optimal(results[i].raw, results[0].raw);
            row.mean_raw = results[i].mean_raw;
            row.mean_shifted = results[i].mean_shifted;
            row.std_error_shifted = standard_error(results[i].shifted);
            rows.push_back(row);
        }
    }
    auto f = open_out(out_path);
    write_results_csv(f, rows);
    write_results_csv(out, rows);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Crossing-state models and backward ADP for wind-backed energy storage", "hsadp"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    std::string spec_path, gen_out;
    auto* gen = app.add_subcommand("gen-data", "Generate synthetic wind and price training data");
    gen->add_option("--spec", spec_path, "Synthetic spec JSON")->required()->check(CLI::ExistingFile);
    gen->add_option("--out", gen_out, "Output directory")->required();

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "Fit an error model");
    train->add_option("--kind", ta.kind, "Model kind")
        ->required()
        ->check(CLI::IsMember({"hsmm-wind", "hsmm-price", "ar1", "markov", "mrjd"}));
    train->add_option("--input", ta.input, "Training CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--m", ta.m, "Duration bins per sign")->capture_default_str();
    train->add_option("--n", ta.n, "Error bins per crossing state (bins for markov)")->capture_default_str();
    train->add_option("--grid-min", ta.grid_min, "Error grid minimum")->required();
    train->add_option("--grid-max", ta.grid_max, "Error grid maximum")->required();
    train->add_option("--grid-step", ta.grid_step, "Error grid step")->required();
    train->add_option("--out", ta.out, "Model artifact")->required();

    std::string val_model, val_input, val_out;
    auto* validate = app.add_subcommand("validate", "Compare crossing-time CDFs of a model and data");
    validate->add_option("--model", val_model, "Model artifact")->required()->check(CLI::ExistingFile);
    validate->add_option("--input", val_input, "Training CSV")->required()->check(CLI::ExistingFile);
    validate->add_option("--out", val_out, "Output directory")->required();

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Solve the storage MDP");
    solve->add_option("--method", sa.method, "Solver")
        ->required()
        ->check(CLI::IsMember({"exact", "badp-lookup", "badp-linear", "api"}));
    solve->add_option("--alpha", sa.alpha, "Sampling fraction")->capture_default_str();
    solve->add_option("--instance", sa.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
    solve->add_option("--wind-model", sa.wind_model, "Wind model artifact")->required()->check(CLI::ExistingFile);
    solve->add_option("--price-model", sa.price_model, "Price model artifact")->required()->check(CLI::ExistingFile);
    solve->add_option("--out", sa.out, "Policy artifact")->required();
    solve->add_option("--terminal", sa.terminal, "Terminal value rule")
        ->capture_default_str()
        ->check(CLI::IsMember({"zero", "salvage"}));
    solve->add_option("--basis", sa.basis, "Basis for badp-linear")
        ->capture_default_str()
        ->check(CLI::IsMember({"standard", "indicator"}));
    solve->add_option("--loss", sa.loss, "Regression loss for badp-linear")
        ->capture_default_str()
        ->check(CLI::IsMember({"squared", "absolute"}));
    solve->add_option("--max-table-entries", sa.max_entries, "Refuse larger lookup tables")->capture_default_str();
    solve->add_option("--api-iterations", sa.api_iterations, "Policy iterations")->capture_default_str();
    solve->add_option("--api-paths", sa.api_paths, "Rollouts per iteration")->capture_default_str();
    solve->add_option("--api-validation-paths", sa.api_validation_paths, "Validation rollouts")
        ->capture_default_str();
    solve->add_option("--api-time-budget", sa.api_budget, "Seconds before iteration stops")->capture_default_str();

    TuneArgs tu;
    auto* tune = app.add_subcommand("tune-pfa", "Grid-search the buy-low sell-high thresholds");
    tune->add_option("--instance", tu.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
    tune->add_option("--wind-model", tu.wind_model, "Wind model artifact")->required()->check(CLI::ExistingFile);
    tune->add_option("--price-model", tu.price_model, "Price model artifact")->required()->check(CLI::ExistingFile);
    tune->add_option("--scenarios", tu.scenarios, "Tuning scenario set")->required()->check(CLI::ExistingFile);
    tune->add_option("--grid-points", tu.grid_points, "Quantile points per threshold")->capture_default_str();
    tune->add_option("--out", tu.out, "Policy artifact")->required();

    ScenarioArgs sc;
    auto* scen = app.add_subcommand("scenarios", "Build a typical or worst-case scenario set");
    scen->add_option("--kind", sc.kind, "typ or wc")->capture_default_str()->check(CLI::IsMember({"typ", "wc"}));
    scen->add_option("--instance", sc.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
    scen->add_option("--wind-model", sc.wind_model, "Wind model artifact")->required()->check(CLI::ExistingFile);
    scen->add_option("--price-model", sc.price_model, "Price model artifact")->required()->check(CLI::ExistingFile);
    scen->add_option("--count", sc.count, "Paths")->capture_default_str();
    scen->add_flag("--compact", sc.compact, "Sample the Markov approximation");
    scen->add_option("--typical", sc.typical, "Typical set the worst case is built from")->check(CLI::ExistingFile);
    scen->add_option("--price-data", sc.price_data, "Price CSV supplying the high-price days")
        ->check(CLI::ExistingFile);
    scen->add_option("--out", sc.out, "Scenario set artifact")->required();

    std::string sim_policy, sim_scen, sim_out, sim_instance;
    int sim_traces = 10;
    auto* sim = app.add_subcommand("simulate", "Roll a policy over a scenario set");
    sim->add_option("--policy", sim_policy, "Policy artifact")->required()->check(CLI::ExistingFile);
    sim->add_option("--scenarios", sim_scen, "Scenario set artifact")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", sim_out, "Output directory")->required();
    sim->add_option("--instance", sim_instance, "Instance JSON overriding the policy's")->check(CLI::ExistingFile);
    sim->add_option("--max-traces", sim_traces, "Trace files written")->capture_default_str();

    std::string cmp_instance, cmp_out;
    std::vector<std::string> cmp_policies, cmp_sets;
    auto* cmp = app.add_subcommand("compare", "Tabulate policies against the first one");
    cmp->add_option("--instance", cmp_instance, "Instance JSON")->required()->check(CLI::ExistingFile);
    cmp->add_option("--policies", cmp_policies, "Policy artifacts, benchmark first")
        ->required()
        ->delimiter(',')
        ->check(CLI::ExistingFile);
    cmp->add_option("--scenario-sets", cmp_sets, "Scenario set artifacts")
        ->required()
        ->delimiter(',')
        ->check(CLI::ExistingFile);
    cmp->add_option("--out", cmp_out, "Results CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::Success&) {
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error kind=usage message=\"" << e.what() << "\"\n";
        return kExitUsage;
    }

    try {
        if (*gen) cmd_gen_data(spec_path, gen_out, out);
        else if (*train) cmd_train(ta, out);
        else if (*validate) cmd_validate(val_model, val_input, val_out, g, out);
        else if (*solve) cmd_solve(sa, g, out);
        else if (*tune) cmd_tune_pfa(tu, g, out);
        else if (*scen) cmd_scenarios(sc, g, out);
        else if (*sim) cmd_simulate(sim_policy, sim_scen, sim_out, sim_instance, sim_traces, g, out);
        else if (*cmp) cmd_compare(cmp_instance, cmp_policies, cmp_sets, cmp_out, g, out);
    } catch (const InputError& e) {
        err << "error kind=usage message=\"" << e.what() << "\"\n";
        return kExitUsage;
    } catch (const PersistenceError& e) {
        err << "error kind=usage message=\"" << e.what() << "\"\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error kind=runtime message=\"" << e.what() << "\"\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace hsadp::cli
