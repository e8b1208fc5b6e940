#include "toy_pipeline.hpp"

#include <ostream>

#include "cli.hpp"

namespace hsadp::fixtures {

const std::vector<std::string>& toy_result_files() {
    static const std::vector<std::string> files{"results.csv", "validate_wind/ks.csv", "validate_wind/crossing_cdf.csv",
                                                "validate_ar1/ks.csv", "sim_exact/metrics.csv"};
    return files;
}

int run_toy_pipeline(const std::filesystem::path& work, int threads, std::ostream& log) {
    const std::string toy = (std::filesystem::path(HSADP_SOURCE_DIR) / "data" / "toy").string();
    const std::string inst = toy + "/instance.json";
    const std::string w = work.string() + "/";
    const std::string t = std::to_string(threads);
    const std::vector<std::string> models{"--instance", inst, "--wind-model", w + "wind.json", "--price-model",
                                          w + "price.json"};
    auto with_models = [&](std::vector<std::string> head, const std::vector<std::string>& tail) {
        head.insert(head.end(), models.begin(), models.end());
        head.insert(head.end(), tail.begin(), tail.end());
        return head;
    };
    const std::vector<std::vector<std::string>> steps{
        {"gen-data", "--spec", toy + "/synthetic.json", "--out", w + "gen"},
        {"train", "--kind", "hsmm-wind", "--input", w + "gen/wind.csv", "--m", "2", "--n", "2", "--grid-min", "-5000",
         "--grid-max", "5000", "--grid-step", "100", "--out", w + "wind.json"},
        {"train", "--kind", "hsmm-price", "--input", w + "gen/price.csv", "--m", "1", "--n", "3", "--grid-min", "-40",
         "--grid-max", "140", "--grid-step", "4", "--out", w + "price.json"},
        {"train", "--kind", "ar1", "--input", w + "gen/wind.csv", "--grid-min", "-5000", "--grid-max", "5000",
         "--grid-step", "100", "--out", w + "wind_ar1.json"},
        {"validate", "--model", w + "wind.json", "--input", w + "gen/wind.csv", "--out", w + "validate_wind"},
        {"validate", "--model", w + "wind_ar1.json", "--input", w + "gen/wind.csv", "--out", w + "validate_ar1"},
        with_models({"scenarios", "--kind", "typ", "--count", "30"}, {"--out", w + "typ.json"}),
        with_models({"scenarios", "--kind", "wc", "--count", "20"},
                    {"--typical", w + "typ.json", "--price-data", w + "gen/price.csv", "--out", w + "wc.json"}),
        with_models({"solve", "--method", "exact"}, {"--out", w + "exact.json"}),
        with_models({"solve", "--method", "badp-lookup", "--alpha", "0.1"}, {"--out", w + "lookup.json"}),
        with_models({"solve", "--method", "badp-linear", "--alpha", "0.1"}, {"--out", w + "linear.json"}),
        {"solve", "--method", "exact", "--instance", inst, "--wind-model", w + "wind_ar1.json", "--price-model",
         w + "price.json", "--out", w + "ar1.json"},
        with_models({"tune-pfa"}, {"--scenarios", w + "typ.json", "--out", w + "pfa.json"}),
        with_models({"solve", "--method", "api"}, {"--out", w + "api.json"}),
        {"simulate", "--policy", w + "exact.json", "--scenarios", w + "typ.json", "--out", w + "sim_exact",
         "--max-traces", "1"},
        {"compare", "--instance", inst, "--policies",
         w + "exact.json," + w + "lookup.json," + w + "linear.json," + w + "ar1.json," + w + "pfa.json," + w +
             "api.json",
         "--scenario-sets", w + "typ.json," + w + "wc.json", "--out", w + "results.csv"},
    };
    for (const auto& step : steps) {
        std::vector<std::string> args{"hsadp", "--seed", "11", "--threads", t};
        args.insert(args.end(), step.begin(), step.end());
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), log, log);
        if (code != 0) return code;
    }
    return 0;
}

}  // namespace hsadp::fixtures
