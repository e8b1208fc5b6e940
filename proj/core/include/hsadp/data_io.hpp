#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hsadp/baselines.hpp"
#include "hsadp/crossing_model.hpp"
#include "hsadp/policies.hpp"
#include "hsadp/series.hpp"
#include "hsadp/sim_eval.hpp"
#include "hsadp/vfa.hpp"

namespace hsadp {

inline constexpr int kSchemaVersion = 1;

/// Unix seconds from "YYYY-MM-DDTHH:MM[:SS][Z|+00:00]" (a space may replace T). UTC only.
[[nodiscard]] std::int64_t parse_iso8601(const std::string& text);
[[nodiscard]] std::string format_iso8601(std::int64_t seconds);

/// Header `timestamp,actual,reference[,temperature]`, five-minute cadence.
/// Errors name the source and line.
[[nodiscard]] TrainingSeries parse_training_csv(std::istream& in, const std::string& source = "<stream>");
[[nodiscard]] TrainingSeries load_training_csv(const std::filesystem::path& path);
void write_training_csv(std::ostream& out, const TrainingSeries& series);

/// Two-column `timestamp,<value>` file, e.g. a load profile or forecast.
struct TimedColumn {
    std::vector<std::int64_t> timestamps;
    std::vector<double> values;
};
[[nodiscard]] TimedColumn load_timed_column(const std::filesystem::path& path, const std::string& column);

/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes);
[[nodiscard]] std::string hash_hex(std::uint64_t h);

/// JSON envelope {schema_version, kind, created_at, content_hash, payload}.
/// The hash covers the compact dump of the payload.
void save_artifact(const std::filesystem::path& path, const std::string& kind, const std::string& payload_json);
/// Returns the payload as JSON text after checking version, kind and hash.
[[nodiscard]] std::string load_artifact(const std::filesystem::path& path, const std::string& kind);
/// Content hash recorded in an artifact, without validating the payload.
[[nodiscard]] std::string artifact_hash(const std::filesystem::path& path);
/// Kind recorded in an artifact's envelope.
[[nodiscard]] std::string artifact_kind(const std::filesystem::path& path);

/// A trained error model of any supported kind.
struct StoredModel {
    std::string kind;  ///< hsmm-wind, hsmm-price, ar1, markov, mrjd
    ValueGrid grid;
    CrossingStateModel hsmm;
    Ar1Params ar1;
    MrjdParams mrjd;
    MarkovChainParams markov;

    [[nodiscard]] bool is_hsmm() const { return kind == "hsmm-wind" || kind == "hsmm-price"; }
    friend bool operator==(const StoredModel&, const StoredModel&) = default;
};

[[nodiscard]] ProcessPtr make_process(const StoredModel& model);
void save_model(const std::filesystem::path& path, const StoredModel& model);
[[nodiscard]] StoredModel load_model(const std::filesystem::path& path);

/// Provenance recorded next to solver output.
struct SolveRecord {
    std::string method;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    std::string terminal = "zero";
    std::string instance;     ///< paths relative to the artifact's directory
    std::string wind_model;
    std::string price_model;
    std::string wind_model_hash;
    std::string price_model_hash;
    double seconds = 0.0;

    friend bool operator==(const SolveRecord&, const SolveRecord&) = default;
};

/// Manifest JSON at `path`, raw little-endian doubles at `path` + ".bin".
void save_lookup_vfa(const std::filesystem::path& path, const LookupVFA& vfa, const SolveRecord& record);
[[nodiscard]] LookupVFA load_lookup_vfa(const std::filesystem::path& path, SolveRecord* record = nullptr);

void save_linear_vfa(const std::filesystem::path& path, const LinearVFA& vfa, const SolveRecord& record);
[[nodiscard]] LinearVFA load_linear_vfa(const std::filesystem::path& path, SolveRecord* record = nullptr);

void save_pfa(const std::filesystem::path& path, const PfaParams& params, const SolveRecord& record,
              const std::string& scenario_hash);
[[nodiscard]] PfaParams load_pfa(const std::filesystem::path& path, SolveRecord* record = nullptr);

void save_scenario_set(const std::filesystem::path& path, const ScenarioSet& set);
[[nodiscard]] ScenarioSet load_scenario_set(const std::filesystem::path& path);

/// Battery and day description. Series files are resolved against the
/// instance file's directory.
struct Instance {
    std::string name;
    StorageSpec spec;
    Scenario scenario;
    int first_slot = 0;
    std::vector<double> temperature;    ///< optional, drives price conditions
    int temperature_class = 0;          ///< used when no temperature series is given
    bool has_price_reference = false;
};

[[nodiscard]] Instance load_instance(const std::filesystem::path& path);
/// Fills the price reference (from the model's seasonal profile unless the
/// instance carries one) and the price conditions.
void complete_scenario(Instance& instance, const StoredModel& price_model);

/// Knobs of the synthetic generator. Run lengths are negative binomial
/// (number of steps, at least 1) per sign; errors within a run follow a
/// half-sine bump whose amplitude grows with the run length.
struct SyntheticSpec {
    int days = 60;
    std::uint64_t seed = 1;
    std::int64_t start = 1546300800;  ///< 2019-01-01T00:00:00Z

    double wind_forecast_mean = 2500.0;
    double wind_forecast_swing = 800.0;
    double wind_max = 5000.0;
    double up_mean_run = 18.0;
    double up_dispersion = 3.0;    ///< negative binomial size
    double down_mean_run = 30.0;
    double down_dispersion = 1.5;
    double wind_base_amplitude = 150.0;
    double wind_amplitude_per_step = 12.0;
    double wind_amplitude_cap = 1300.0;
    double wind_noise = 40.0;

    double price_mean = 35.0;
    double price_daily_swing = 12.0;
    double price_up_mean_run = 10.0;
    double price_down_mean_run = 14.0;
    double price_dispersion = 2.0;
    double price_base_amplitude = 3.0;
    double price_amplitude_per_step = 0.4;
    double price_amplitude_cap = 25.0;
    double price_noise = 1.0;
    std::vector<double> spike_probability{0.002, 0.002, 0.002, 0.01, 0.006, 0.004};  ///< per temperature condition
    double spike_magnitude = 60.0;

    double temperature_mean = 70.0;
    double temperature_daily_swing = 10.0;
    double temperature_trend_swing = 8.0;
    double temperature_trend_days = 9.0;

    void validate() const;
};

[[nodiscard]] SyntheticSpec parse_synthetic_spec(const std::string& json_text);

struct SyntheticData {
    TrainingSeries wind;
    TrainingSeries price;
    std::vector<int> wind_run_lengths;  ///< ground-truth runs, in order
    std::vector<int> wind_run_signs;
    std::vector<int> price_run_lengths;
    std::vector<int> price_run_signs;
    std::string ground_truth_json;      ///< generator laws for recovery checks
};

[[nodiscard]] SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Negative binomial run-length PMF used by the generator: P(D = d) for d >= 1,
/// with D - 1 ~ NB(size, mean - 1).
[[nodiscard]] double run_length_pmf(double mean, double size, int d);

}  // namespace hsadp
