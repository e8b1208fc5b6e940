#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "hsadp/baselines.hpp"
#include "hsadp/crossings.hpp"
#include "hsadp/data_io.hpp"
#include "hsadp/dp_solvers.hpp"
#include "hsadp/errors.hpp"
#include "hsadp/price_model.hpp"
#include "hsadp/sim_eval.hpp"

using namespace hsadp;
using namespace hsadp::fixtures;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& csv) {
    std::istringstream in(csv);
    try {
        (void)parse_training_csv(in, "f.csv");
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

/// Replaces the first occurrence of `from`; fails the test if absent.
std::string patched(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

double variance_of(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("iso-8601 timestamps") {
    CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_iso8601("2019-06-01T00:05:00Z") == 1559347500);
    CHECK(parse_iso8601("2019-06-01 00:05") == 1559347500);
    CHECK(parse_iso8601("2019-06-01T00:05:00+00:00") == 1559347500);
    CHECK(parse_iso8601("2020-02-29T23:59:59Z") == 1583020799);
    CHECK(format_iso8601(1559347500) == "2019-06-01T00:05:00Z");
    CHECK(format_iso8601(-300) == "1969-12-31T23:55:00Z");
    for (const char* bad : {"2019-13-01T00:00Z", "2019-06-01", "2019-06-01T00:05:00+02:00", "2019-02-30T00:00Z",
                            "yesterday"})
        CHECK_THROWS_AS((void)parse_iso8601(bad), InputError);
}

TEST_CASE("training csv parses and round-trips") {
    const std::string csv =
        "timestamp,actual,reference,temperature\n"
        "2019-06-01T00:00:00Z,10,12.5,70\n"
        "2019-06-01T00:05:00Z,11,12.5,71\n"
        "\n"
        "2019-06-01T00:10:00Z,9.25,13,72.5\n";
    std::istringstream in(csv);
    const TrainingSeries s = parse_training_csv(in);
    CHECK(s.size() == 3u);
    CHECK(s.actual == std::vector<double>{10.0, 11.0, 9.25});
    CHECK(s.reference == std::vector<double>{12.5, 12.5, 13.0});
    CHECK(s.temperature == std::vector<double>{70.0, 71.0, 72.5});
    CHECK(s.first_slot() == 0);
    CHECK(compute_errors(s) == std::vector<double>{-2.5, -1.5, -3.75});
    std::ostringstream out;
    write_training_csv(out, s);
    CHECK(out.str() == "timestamp,actual,reference,temperature\n"
                       "2019-06-01T00:00:00Z,10,12.5,70\n"
                       "2019-06-01T00:05:00Z,11,12.5,71\n"
                       "2019-06-01T00:10:00Z,9.25,13,72.5\n");
    std::istringstream again(out.str());
    const TrainingSeries t = parse_training_csv(again);
    CHECK(t.timestamps == s.timestamps);
    CHECK(t.actual == s.actual);
}

TEST_CASE("training csv errors name the line") {
    const std::string head = "timestamp,actual,reference\n";
    CHECK(error_of(head) == "f.csv: no data rows");
    CHECK(error_of("") == "f.csv: empty file");
    CHECK(error_of("time,actual,reference\n").find("f.csv:1: expected header") == 0);
    CHECK(error_of(head + "2019-06-01T00:00Z,1,2\n2019-06-01T00:05Z,1\n").find("f.csv:3: expected 3 fields") == 0);
    CHECK(error_of(head + "2019-06-01T00:00Z,1,2\n2019-06-01T00:05Z,x,2\n").find("f.csv:3: bad actual") == 0);
    CHECK(error_of(head + "2019-06-01T00:00Z,1,2\nnoon,1,2\n").find("f.csv:3: bad ISO-8601") == 0);
    CHECK(error_of(head + "2019-06-01T00:00Z,1,2\n2019-06-01T00:10Z,1,2\n").find("f.csv:3: timestamps must advance") ==
          0);
    CHECK(error_of(head + "2019-06-01T00:00Z,1,2\n") == "f.csv: training series needs at least 2 points");
    CHECK_THROWS_AS((void)load_training_csv("/nonexistent/x.csv"), InputError);
}

TEST_CASE("models round-trip bitwise") {
    ScratchDir dir("models");
    SyntheticSpec spec;
    spec.days = 8;
    spec.seed = 5;
    const SyntheticData data = generate_synthetic(spec);

    StoredModel hsmm;
    hsmm.kind = "hsmm-wind";
    hsmm.grid = ValueGrid{-1500.0, 1500.0, 100.0};
    hsmm.hsmm = fit_crossing_model(compute_errors(data.wind), ModelHyperparams{2, 2, hsmm.grid});
    save_model(dir / "w.json", hsmm);
    const StoredModel back = load_model(dir / "w.json");
    CHECK(back == hsmm);

    StoredModel ar;
    ar.kind = "ar1";
    ar.grid = hsmm.grid;
    ar.ar1 = Ar1Params{0.9123456789012345, 77.7};
    save_model(dir / "a.json", ar);
    CHECK(load_model(dir / "a.json") == ar);

    StoredModel mc;
    mc.kind = "markov";
    mc.grid = hsmm.grid;
    mc.markov = fit_markov_chain(compute_errors(data.wind), 3, mc.grid);
    save_model(dir / "m.json", mc);
    CHECK(load_model(dir / "m.json") == mc);
    CHECK(artifact_kind(dir / "m.json") == "model");
}

TEST_CASE("value functions, policies and scenario sets round-trip") {
    ScratchDir dir("vfa");
    const TinyInstance inst = tiny_instance(4);
    const LookupVFA table = exact_backward_dp(inst.mdp);
    SolveRecord rec;
    rec.method = "exact";
    rec.seed = 9;
    rec.wind_model_hash = "00ff";
    save_lookup_vfa(dir / "v.json", table, rec);
    SolveRecord rec_back;
    CHECK(load_lookup_vfa(dir / "v.json", &rec_back) == table);
    CHECK(rec_back == rec);

    LinearVFA lin;
    lin.feature_space = "post";
    lin.basis = "standard";
    lin.theta = {{0.1, -2.0 / 3.0}, {1e-300, 5e300}};
    save_linear_vfa(dir / "l.json", lin, rec);
    CHECK(load_linear_vfa(dir / "l.json") == lin);

    save_pfa(dir / "p.json", PfaParams{41.5, 17.25}, rec, "abcd");
    CHECK(load_pfa(dir / "p.json") == PfaParams{41.5, 17.25});

    const ScenarioSet set = build_typical_set(*inst.mdp.wind, *inst.mdp.price, inst.mdp.scenario, 3, 4);
    save_scenario_set(dir / "s.json", set);
    const ScenarioSet got = load_scenario_set(dir / "s.json");
    CHECK(got.label == set.label);
    CHECK(got.seed == set.seed);
    REQUIRE(got.paths.size() == 3u);
    for (int i = 0; i < 3; ++i) {
        CHECK(got.paths[i].wind_error == set.paths[i].wind_error);
        CHECK(got.paths[i].price_error == set.paths[i].price_error);
    }
    CHECK_THROWS_AS((void)load_pfa(dir / "s.json"), PersistenceError);
}

TEST_CASE("artifacts refuse version mismatch and corruption") {
    ScratchDir dir("refuse");
    StoredModel ar;
    ar.kind = "ar1";
    ar.grid = ValueGrid{-100.0, 100.0, 10.0};
    ar.ar1 = Ar1Params{0.5, 12.0};
    save_model(dir / "a.json", ar);
    const std::string text = read_text(dir / "a.json");

    write_text(dir / "v.json", patched(text, "\"schema_version\": 1", "\"schema_version\": 99"));
    CHECK_THROWS_WITH_AS((void)load_model(dir / "v.json"), doctest::Contains("schema version 99"), PersistenceError);

    write_text(dir / "c.json", patched(text, "12.0", "12.5"));
    CHECK_THROWS_WITH_AS((void)load_model(dir / "c.json"), doctest::Contains("checksum"), PersistenceError);

    write_text(dir / "t.json", text.substr(0, text.size() / 2));
    CHECK_THROWS_AS((void)load_model(dir / "t.json"), PersistenceError);

    const TinyInstance inst = tiny_instance(2);
    save_lookup_vfa(dir / "v2.json", exact_backward_dp(inst.mdp), SolveRecord{});
    std::string blob = read_text(dir / "v2.json.bin");
    blob[3] = static_cast<char>(blob[3] ^ 0x10);
    write_text(dir / "v2.json.bin", blob);
    CHECK_THROWS_WITH_AS((void)load_lookup_vfa(dir / "v2.json"), doctest::Contains("checksum"), PersistenceError);
    write_text(dir / "v2.json.bin", blob.substr(8));
    CHECK_THROWS_WITH_AS((void)load_lookup_vfa(dir / "v2.json"), doctest::Contains("truncated"), PersistenceError);
}

TEST_CASE("instances load and complete from the price model") {
    const fs::path toy = fs::path(HSADP_SOURCE_DIR) / "data" / "toy";
    Instance inst = load_instance(toy / "instance.json");
    CHECK(inst.spec.r_levels == 11);
    CHECK(inst.scenario.horizon == 288);
    CHECK(inst.scenario.load_kw.size() == 289u);
    CHECK(inst.first_slot == 0);
    CHECK_FALSE(inst.has_price_reference);

    SyntheticSpec spec;
    spec.days = 6;
    const SyntheticData data = generate_synthetic(spec);
    StoredModel price;
    price.kind = "hsmm-price";
    price.grid = ValueGrid{-40.0, 140.0, 4.0};
    price.hsmm = fit_price_model(data.price, ModelHyperparams{1, 2, price.grid});
    complete_scenario(inst, price);
    for (int t = 0; t <= 288; t += 37) CHECK(inst.scenario.price_reference[t] == price.hsmm.price->reference(t));
    CHECK(inst.scenario.price_conditions == std::vector<int>(289, inst.temperature_class));

    StoredModel ar;
    ar.kind = "ar1";
    Instance bare = load_instance(toy / "instance.json");
    CHECK_THROWS_AS(complete_scenario(bare, ar), InputError);

    ScratchDir dir("inst");
    write_text(dir / "load.csv", "timestamp,load_kw\n2019-07-01T00:00:00Z,1\n");
    write_text(dir / "f.csv", "timestamp,forecast_kw\n2019-07-01T00:00:00Z,1\n");
    write_text(dir / "i.json", R"({"r_max_mwh": 0.4, "rho_kwh": 40, "load_csv": "load.csv", "wind_forecast_csv": "f.csv"})");
    CHECK_THROWS_WITH_AS((void)load_instance(dir / "i.json"), doctest::Contains("shorter"), InputError);
    write_text(dir / "j.json", R"({"rho_kwh": 40})");
    CHECK_THROWS_AS((void)load_instance(dir / "j.json"), InputError);
}

TEST_CASE("synthetic generator is seeded and valid") {
    SyntheticSpec spec;
    spec.days = 3;
    spec.seed = 21;
    const SyntheticData a = generate_synthetic(spec);
    const SyntheticData b = generate_synthetic(spec);
    CHECK(a.wind.actual == b.wind.actual);
    CHECK(a.price.actual == b.price.actual);
    CHECK(a.price.temperature == b.price.temperature);
    CHECK(a.ground_truth_json == b.ground_truth_json);
    spec.seed = 22;
    CHECK(generate_synthetic(spec).wind.actual != a.wind.actual);
    CHECK_NOTHROW(a.wind.validate());
    CHECK_NOTHROW(a.price.validate());
    CHECK(a.wind.size() == 3u * 288u);
    CHECK(a.price.has_temperature());
    for (double w : a.wind.actual) CHECK((w >= 0.0 && w <= spec.wind_max));

    SyntheticSpec bad;
    bad.up_dispersion = 0.0;
    CHECK_THROWS_AS(bad.validate(), InputError);
    CHECK_THROWS_AS((void)parse_synthetic_spec(R"({"days": 0})"), InputError);
    CHECK(parse_synthetic_spec(R"({"days": 4, "seed": 3, "start_iso": "2019-06-01T00:00:00Z"})").start == 1559347200);

    double total = 0.0;
    for (int d = 1; d < 2000; ++d) total += run_length_pmf(12.0, 2.0, d);
    CHECK(total == doctest::Approx(1.0));
    double mean = 0.0;
    for (int d = 1; d < 2000; ++d) mean += d * run_length_pmf(12.0, 2.0, d);
    CHECK(mean == doctest::Approx(12.0));
}

TEST_CASE("fitted switch matrix recovers the generator's entry law") {
    SyntheticSpec spec;
    spec.days = 400;
    spec.seed = 31;
    const SyntheticData data = generate_synthetic(spec);
    REQUIRE(data.wind.size() >= 100000u);
    const ValueGrid grid{-1500.0, 1500.0, 100.0};
    const CrossingStateModel m = fit_crossing_model(compute_errors(data.wind), ModelHyperparams{3, 1, grid});
    // runs are drawn independently, so row i of the switch matrix is the bin mass of the opposite-sign law
    const double means[2] = {spec.down_mean_run, spec.up_mean_run};
    const double sizes[2] = {spec.down_dispersion, spec.up_dispersion};
    for (int i = 0; i < m.num_states(); ++i) {
        const int next_sign = 1 - m.sign_of_state(i);
        std::vector<double> mass(3, 0.0);
        for (int d = 1; d < 5000; ++d) mass[m.duration_bin(next_sign, d)] += run_length_pmf(means[next_sign], sizes[next_sign], d);
        for (int b = 0; b < 3; ++b)
            CHECK(std::abs(m.switch_matrix[i][m.state_index(next_sign, b)] - mass[b]) <= 0.03);
    }
}

TEST_CASE("generated error variance grows with the duration bin") {
    SyntheticSpec spec;
    spec.days = 60;
    spec.seed = 8;
    const SyntheticData data = generate_synthetic(spec);
    const std::vector<double> errors = compute_errors(data.wind);
    for (int sign : {0, 1}) {
        std::vector<double> lengths;
        for (std::size_t r = 0; r < data.wind_run_lengths.size(); ++r)
            if (data.wind_run_signs[r] == sign) lengths.push_back(data.wind_run_lengths[r]);
        const QuantileBins bins = quantile_bins(lengths, 3);
        std::vector<std::vector<double>> by_bin(3);
        std::size_t t = 0;
        for (std::size_t r = 0; r < data.wind_run_lengths.size() && t < errors.size(); ++r) {
            const int d = data.wind_run_lengths[r];
            for (int k = 0; k < d && t < errors.size(); ++k, ++t)
                if (data.wind_run_signs[r] == sign) by_bin[bins.bin_of(d)].push_back(errors[t]);
        }
        CHECK(variance_of(by_bin[0]) < variance_of(by_bin[1]));
        CHECK(variance_of(by_bin[1]) < variance_of(by_bin[2]));
    }
}
