#include "hsadp/data_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "hsadp/errors.hpp"
#include "hsadp/price_model.hpp"
#include "hsadp/rng.hpp"

namespace hsadp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PersistenceError("cannot write " + path.string());
    out << bytes;
    if (!out) throw PersistenceError("write failed for " + path.string());
}

std::string now_iso() {
    const auto now = std::chrono::system_clock::now();
    return format_iso8601(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

json grid_json(const ValueGrid& g) { return {{"min", g.min}, {"max", g.max}, {"step", g.step}}; }

ValueGrid grid_from(const json& j) {
    ValueGrid g{j.at("min").get<double>(), j.at("max").get<double>(), j.at("step").get<double>()};
    g.validate();
    return g;
}

json cdf_json(const DurationCdf& c) { return {{"cdf", c.cdf}, {"empty", c.empty}}; }

DurationCdf cdf_from(const json& j) {
    DurationCdf c;
    c.cdf = j.at("cdf").get<std::vector<double>>();
    c.empty = j.at("empty").get<bool>();
    return c;
}

json hsmm_json(const CrossingStateModel& m) {
    json j;
    j["hyper"] = {{"m", m.hyper.m}, {"n", m.hyper.n}, {"grid", grid_json(m.hyper.grid)}};
    j["num_conditions"] = m.num_conditions;
    j["duration_bins"] = {m.duration_bins[0].edges, m.duration_bins[1].edges};
    j["sojourn"] = json::array();
    for (const auto& c : m.sojourn) j["sojourn"].push_back(cdf_json(c));
    j["error_bins"] = json::array();
    for (const auto& b : m.error_bins) j["error_bins"].push_back(b.edges);
    j["switch_matrix"] = m.switch_matrix;
    j["compact_matrix"] = m.compact_matrix;
    j["stay"] = m.stay;
    j["entry"] = m.entry;
    j["state_occupancy"] = m.state_occupancy;
    const auto& d = m.diagnostics;
    j["diagnostics"] = {{"flagged_switch_rows", d.flagged_switch_rows},
                        {"flagged_compact_rows", d.flagged_compact_rows},
                        {"empty_duration_bins", d.empty_duration_bins},
                        {"stay_fallbacks", d.stay_fallbacks},
                        {"entry_fallbacks", d.entry_fallbacks},
                        {"closed_segments", d.closed_segments}};
    if (m.price) {
        const auto& p = *m.price;
        j["price"] = {{"period", p.period},
                      {"seasonal", p.seasonal},
                      {"mean_level", p.mean_level},
                      {"seasonal_max", p.seasonal_max},
                      {"trend_max", p.trend_max}};
    }
    return j;
}

CrossingStateModel hsmm_from(const json& j) {
    CrossingStateModel m;
    m.hyper.m = j.at("hyper").at("m").get<int>();
    m.hyper.n = j.at("hyper").at("n").get<int>();
    m.hyper.grid = grid_from(j.at("hyper").at("grid"));
    m.num_conditions = j.at("num_conditions").get<int>();
    for (int s = 0; s < 2; ++s) m.duration_bins[s].edges = j.at("duration_bins").at(s).get<std::vector<double>>();
    for (const auto& c : j.at("sojourn")) m.sojourn.push_back(cdf_from(c));
    for (const auto& b : j.at("error_bins")) m.error_bins.push_back({b.get<std::vector<double>>()});
    m.switch_matrix = j.at("switch_matrix").get<Matrix>();
    m.compact_matrix = j.at("compact_matrix").get<Matrix>();
    m.stay = j.at("stay").get<std::vector<std::vector<std::vector<Pmf>>>>();
    m.entry = j.at("entry").get<std::vector<std::vector<Pmf>>>();
    m.state_occupancy = j.at("state_occupancy").get<std::vector<double>>();
    const auto& d = j.at("diagnostics");
    m.diagnostics.flagged_switch_rows = d.at("flagged_switch_rows").get<std::vector<int>>();
    m.diagnostics.flagged_compact_rows = d.at("flagged_compact_rows").get<std::vector<int>>();
    m.diagnostics.empty_duration_bins = d.at("empty_duration_bins").get<std::vector<int>>();
    m.diagnostics.stay_fallbacks = d.at("stay_fallbacks").get<int>();
    m.diagnostics.entry_fallbacks = d.at("entry_fallbacks").get<int>();
    m.diagnostics.closed_segments = d.at("closed_segments").get<int>();
    if (j.contains("price")) {
        const auto& p = j.at("price");
        PriceModelExtras e;
        e.period = p.at("period").get<int>();
        e.seasonal = p.at("seasonal").get<std::vector<double>>();
        e.mean_level = p.at("mean_level").get<double>();
        e.seasonal_max = p.at("seasonal_max").get<double>();
        e.trend_max = p.at("trend_max").get<double>();
        m.price = std::move(e);
    }
    m.check_invariants();
    return m;
}

json record_json(const SolveRecord& r) {
    return {{"method", r.method},
            {"alpha", r.alpha},
            {"seed", r.seed},
            {"terminal", r.terminal},
            {"instance", r.instance},
            {"wind_model", r.wind_model},
            {"price_model", r.price_model},
            {"wind_model_hash", r.wind_model_hash},
            {"price_model_hash", r.price_model_hash},
            {"seconds", r.seconds}};
}

SolveRecord record_from(const json& j) {
    SolveRecord r;
    r.method = j.at("method").get<std::string>();
    r.alpha = j.at("alpha").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.terminal = j.at("terminal").get<std::string>();
    r.instance = j.at("instance").get<std::string>();
    r.wind_model = j.at("wind_model").get<std::string>();
    r.price_model = j.at("price_model").get<std::string>();
    r.wind_model_hash = j.at("wind_model_hash").get<std::string>();
    r.price_model_hash = j.at("price_model_hash").get<std::string>();
    r.seconds = j.at("seconds").get<double>();
    return r;
}

template <typename Fn>
auto guarded(const fs::path& path, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw PersistenceError(path.string() + ": malformed content: " + e.what());
    }
}

json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw PersistenceError(source + ": invalid JSON: " + e.what());
    }
}

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) throw InputError("invalid calendar date");
    return sys_days{ymd}.time_since_epoch().count();
}

/// Inverse-CDF draw from the run-length law.
struct RunLaw {
    std::vector<double> cdf;  ///< cdf[d] = P(D <= d)

    RunLaw(double mean, double size) {
        cdf.push_back(0.0);
        double acc = 0.0;
        for (int d = 1; acc < 1.0 - 1e-12 && d < 100000; ++d) {
            acc += run_length_pmf(mean, size, d);
            cdf.push_back(acc);
        }
    }
    int draw(double u) const {
        const double target = u * cdf.back();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
        return std::max(1, static_cast<int>(it - cdf.begin()));
    }
};

struct RunGenerator {
    RunLaw up;
    RunLaw down;
    double base;
    double per_step;
    double cap;
    double noise;
    double floor;

    /// Appends `count` errors made of alternating bumps; returns run records.
    void fill(int count, Rng& rng, std::vector<double>& out, std::vector<int>& lengths, std::vector<int>& signs) const {
        int sign = rng.uniform() < 0.5 ? 1 : 0;
        while (static_cast<int>(out.size()) < count) {
            const int d = (sign ? up : down).draw(rng.uniform());
            const double amp = std::min(cap, base + per_step * d);
            for (int k = 0; k < d && static_cast<int>(out.size()) < count; ++k) {
                const double shape = std::sin(std::numbers::pi * (k + 0.5) / d);
                const double mag = std::max(floor, amp * shape + noise * rng.normal());
                out.push_back(sign ? mag : -mag);
            }
            lengths.push_back(d);
            signs.push_back(sign);
            sign = 1 - sign;
        }
    }
};

}  // namespace

std::int64_t parse_iso8601(const std::string& text) {
    const std::string s = trim(text);
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    std::size_t pos = 0;
    auto number = [&](int digits, int& out) {
        if (pos + digits > s.size()) return false;
        const auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + digits, out);
        if (ec != std::errc() || ptr != s.data() + pos + digits) return false;
        pos += digits;
        return true;
    };
    auto expect = [&](char c) {
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    };
    const bool ok = number(4, y) && expect('-') && number(2, mo) && expect('-') && number(2, d) &&
                    (expect('T') || expect(' ')) && number(2, h) && expect(':') && number(2, mi);
    if (!ok) throw InputError("bad ISO-8601 timestamp '" + text + "'");
    if (expect(':') && !number(2, sec)) throw InputError("bad ISO-8601 seconds in '" + text + "'");
    if (pos < s.size()) {
        const std::string zone = s.substr(pos);
        if (zone != "Z" && zone != "+00:00" && zone != "+0000")
            throw InputError("only UTC timestamps are supported: '" + text + "'");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60)
        throw InputError("out-of-range field in '" + text + "'");
    return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 + h * 3600 + mi * 60 + sec;
}

std::string format_iso8601(std::int64_t seconds) {
    using namespace std::chrono;
    const auto day_count = static_cast<std::int64_t>(std::floor(static_cast<double>(seconds) / 86400.0));
    const std::int64_t rem = seconds - day_count * 86400;
    const year_month_day ymd{sys_days{days{day_count}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                  static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
    return buf;
}

TrainingSeries parse_training_csv(std::istream& in, const std::string& source) {
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) -> InputError {
        return InputError(source + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw InputError(source + ": empty file");
    const auto header = split(trim(line), ',');
    const bool with_temp = header.size() == 4 && header[3] == "temperature";
    if (header.size() < 3 || header[0] != "timestamp" || header[1] != "actual" || header[2] != "reference" ||
        (header.size() == 4 && !with_temp) || header.size() > 4)
        throw fail("expected header timestamp,actual,reference[,temperature]");

    TrainingSeries s;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(trim(line), ',');
        if (cells.size() != header.size())
            throw fail("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
        try {
            s.timestamps.push_back(parse_iso8601(cells[0]));
        } catch (const InputError& e) {
            throw fail(e.what());
        }
        double v = 0.0;
        if (!parse_double(cells[1], v)) throw fail("bad actual value '" + cells[1] + "'");
        s.actual.push_back(v);
        if (!parse_double(cells[2], v)) throw fail("bad reference value '" + cells[2] + "'");
        s.reference.push_back(v);
        if (with_temp) {
            if (!parse_double(cells[3], v)) throw fail("bad temperature value '" + cells[3] + "'");
            s.temperature.push_back(v);
        }
        if (s.timestamps.size() >= 2) {
            const auto step = s.timestamps.back() - s.timestamps[s.timestamps.size() - 2];
            if (step != kStepSeconds)
                throw fail("timestamps must advance by " + std::to_string(kStepSeconds) + " s, got " +
                           std::to_string(step));
        }
    }
    if (s.actual.empty()) throw InputError(source + ": no data rows");
    try {
        s.validate();
    } catch (const InputError& e) {
        throw InputError(source + ": " + e.what());
    }
    return s;
}

TrainingSeries load_training_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return parse_training_csv(in, path.string());
}

void write_training_csv(std::ostream& out, const TrainingSeries& s) {
    out << "timestamp,actual,reference" << (s.has_temperature() ? ",temperature" : "") << '\n';
    for (std::size_t t = 0; t < s.size(); ++t) {
        out << format_iso8601(s.timestamps[t]) << ',' << format_number(s.actual[t]) << ','
            << format_number(s.reference[t]);
        if (s.has_temperature()) out << ',' << format_number(s.temperature[t]);
        out << '\n';
    }
}

TimedColumn load_timed_column(const fs::path& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        return InputError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (!std::getline(in, line)) throw InputError(path.string() + ": empty file");
    ++line_no;
    const auto header = split(trim(line), ',');
    if (header.size() != 2 || header[0] != "timestamp" || header[1] != column)
        throw fail("expected header timestamp," + column);
    TimedColumn out;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(trim(line), ',');
        if (cells.size() != 2) throw fail("expected 2 fields");
        try {
            out.timestamps.push_back(parse_iso8601(cells[0]));
        } catch (const InputError& e) {
            throw fail(e.what());
        }
        double v = 0.0;
        if (!parse_double(cells[1], v)) throw fail("bad value '" + cells[1] + "'");
        out.values.push_back(v);
        if (out.timestamps.size() >= 2 && out.timestamps.back() - out.timestamps[out.timestamps.size() - 2] != kStepSeconds)
            throw fail("timestamps must advance by 300 s");
    }
    if (out.values.empty()) throw InputError(path.string() + ": no data rows");
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void save_artifact(const fs::path& path, const std::string& kind, const std::string& payload_json) {
    const json payload = parse_json_text(payload_json, "payload");
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = kind;
    doc["created_at"] = now_iso();
    doc["content_hash"] = hash_hex(fnv1a64(payload.dump()));
    doc["payload"] = payload;
    write_file(path, doc.dump(1) + "\n");
}

std::string load_artifact(const fs::path& path, const std::string& kind) {
    const json doc = parse_json_text(read_file(path), path.string());
    return guarded(path, [&] {
        const int version = doc.at("schema_version").get<int>();
        if (version != kSchemaVersion)
            throw PersistenceError(path.string() + ": schema version " + std::to_string(version) + ", expected " +
                                   std::to_string(kSchemaVersion));
        const auto found = doc.at("kind").get<std::string>();
        if (found != kind) throw PersistenceError(path.string() + ": holds a " + found + ", expected a " + kind);
        const std::string dumped = doc.at("payload").dump();
        if (hash_hex(fnv1a64(dumped)) != doc.at("content_hash").get<std::string>())
            throw PersistenceError(path.string() + ": checksum mismatch");
        return dumped;
    });
}

std::string artifact_hash(const fs::path& path) {
    const json doc = parse_json_text(read_file(path), path.string());
    return guarded(path, [&] { return doc.at("content_hash").get<std::string>(); });
}

std::string artifact_kind(const fs::path& path) {
    const json doc = parse_json_text(read_file(path), path.string());
    return guarded(path, [&] { return doc.at("kind").get<std::string>(); });
}

ProcessPtr make_process(const StoredModel& m) {
    if (m.is_hsmm()) return std::make_shared<HsmmProcess>(m.hsmm);
    if (m.kind == "ar1") return std::make_shared<Ar1Process>(m.ar1, m.grid);
    if (m.kind == "mrjd") return std::make_shared<MrjdProcess>(m.mrjd, m.grid);
    if (m.kind == "markov") return std::make_shared<MarkovChainProcess>(m.markov);
    throw InputError("unknown model kind '" + m.kind + "'");
}

void save_model(const fs::path& path, const StoredModel& m) {
    json p;
    p["model_kind"] = m.kind;
    p["grid"] = grid_json(m.grid);
    if (m.is_hsmm()) {
        p["hsmm"] = hsmm_json(m.hsmm);
    } else if (m.kind == "ar1") {
        p["ar1"] = {{"gamma", m.ar1.gamma}, {"resid_std", m.ar1.resid_std}};
    } else if (m.kind == "mrjd") {
        p["mrjd"] = {{"gamma", m.mrjd.gamma},
                     {"base_std", m.mrjd.base_std},
                     {"jump_std", m.mrjd.jump_std},
                     {"jump_prob", m.mrjd.jump_prob}};
    } else if (m.kind == "markov") {
        p["markov"] = {{"grid", grid_json(m.markov.grid)},
                       {"bins", m.markov.bins.edges},
                       {"successor", m.markov.successor},
                       {"marginal", m.markov.marginal}};
    } else {
        throw InputError("unknown model kind '" + m.kind + "'");
    }
    save_artifact(path, "model", p.dump());
}

StoredModel load_model(const fs::path& path) {
    const json p = json::parse(load_artifact(path, "model"));
    return guarded(path, [&] {
        StoredModel m;
        m.kind = p.at("model_kind").get<std::string>();
        m.grid = grid_from(p.at("grid"));
        if (m.is_hsmm()) {
            m.hsmm = hsmm_from(p.at("hsmm"));
        } else if (m.kind == "ar1") {
            m.ar1 = {p.at("ar1").at("gamma").get<double>(), p.at("ar1").at("resid_std").get<double>()};
            m.ar1.validate();
        } else if (m.kind == "mrjd") {
            const auto& j = p.at("mrjd");
            m.mrjd = {j.at("gamma").get<double>(), j.at("base_std").get<double>(), j.at("jump_std").get<double>(),
                      j.at("jump_prob").get<double>()};
            m.mrjd.validate();
        } else if (m.kind == "markov") {
            const auto& j = p.at("markov");
            m.markov.grid = grid_from(j.at("grid"));
            m.markov.bins.edges = j.at("bins").get<std::vector<double>>();
            m.markov.successor = j.at("successor").get<std::vector<Pmf>>();
            m.markov.marginal = j.at("marginal").get<Pmf>();
        } else {
            throw PersistenceError(path.string() + ": unknown model kind '" + m.kind + "'");
        }
        return m;
    });
}

void save_lookup_vfa(const fs::path& path, const LookupVFA& vfa, const SolveRecord& record) {
    static_assert(std::endian::native == std::endian::little, "blob layout assumes a little-endian host");
    const auto& values = vfa.values();
    std::string blob(values.size() * sizeof(double), '\0');
    if (!values.empty()) std::memcpy(blob.data(), values.data(), blob.size());
    fs::path blob_path = path;
    blob_path += ".bin";
    write_file(blob_path, blob);
    json p;
    p["horizon"] = vfa.horizon();
    p["levels"] = vfa.levels();
    p["wind_info"] = vfa.wind_info();
    p["price_info"] = vfa.price_info();
    p["blob"] = blob_path.filename().string();
    p["blob_bytes"] = blob.size();
    p["blob_hash"] = hash_hex(fnv1a64(blob));
    p["encoding"] = "f64le";
    p["record"] = record_json(record);
    save_artifact(path, "lookup_vfa", p.dump());
}

LookupVFA load_lookup_vfa(const fs::path& path, SolveRecord* record) {
    const json p = json::parse(load_artifact(path, "lookup_vfa"));
    return guarded(path, [&] {
        LookupVFA vfa(p.at("horizon").get<int>(), p.at("levels").get<int>(), p.at("wind_info").get<int>(),
                      p.at("price_info").get<int>());
        const fs::path blob_path = path.parent_path() / p.at("blob").get<std::string>();
        const std::string blob = read_file(blob_path);
        if (blob.size() != p.at("blob_bytes").get<std::size_t>() ||
            blob.size() != vfa.values().size() * sizeof(double))
            throw PersistenceError(blob_path.string() + ": truncated table");
        if (hash_hex(fnv1a64(blob)) != p.at("blob_hash").get<std::string>())
            throw PersistenceError(blob_path.string() + ": checksum mismatch");
        if (!blob.empty()) std::memcpy(vfa.values().data(), blob.data(), blob.size());
        if (record) *record = record_from(p.at("record"));
        return vfa;
    });
}

void save_linear_vfa(const fs::path& path, const LinearVFA& vfa, const SolveRecord& record) {
    json p;
    p["feature_space"] = vfa.feature_space;
    p["basis"] = vfa.basis;
    p["theta"] = vfa.theta;
    p["record"] = record_json(record);
    save_artifact(path, "linear_vfa", p.dump());
}

LinearVFA load_linear_vfa(const fs::path& path, SolveRecord* record) {
    const json p = json::parse(load_artifact(path, "linear_vfa"));
    return guarded(path, [&] {
        LinearVFA v;
        v.feature_space = p.at("feature_space").get<std::string>();
        v.basis = p.at("basis").get<std::string>();
        v.theta = p.at("theta").get<std::vector<std::vector<double>>>();
        if (record) *record = record_from(p.at("record"));
        return v;
    });
}

void save_pfa(const fs::path& path, const PfaParams& params, const SolveRecord& record,
              const std::string& scenario_hash) {
    json p;
    p["theta_h"] = params.theta_h;
    p["theta_l"] = params.theta_l;
    p["scenario_hash"] = scenario_hash;
    p["record"] = record_json(record);
    save_artifact(path, "pfa", p.dump());
}

PfaParams load_pfa(const fs::path& path, SolveRecord* record) {
    const json p = json::parse(load_artifact(path, "pfa"));
    return guarded(path, [&] {
        PfaParams params{p.at("theta_h").get<double>(), p.at("theta_l").get<double>()};
        params.validate();
        if (record) *record = record_from(p.at("record"));
        return params;
    });
}

void save_scenario_set(const fs::path& path, const ScenarioSet& set) {
    json p;
    p["label"] = set.label;
    p["seed"] = set.seed;
    p["paths"] = json::array();
    for (const auto& path_i : set.paths)
        p["paths"].push_back({{"wind_error", path_i.wind_error}, {"price_error", path_i.price_error}});
    save_artifact(path, "scenario_set", p.dump());
}

ScenarioSet load_scenario_set(const fs::path& path) {
    const json p = json::parse(load_artifact(path, "scenario_set"));
    return guarded(path, [&] {
        ScenarioSet set;
        set.label = p.at("label").get<std::string>();
        set.seed = p.at("seed").get<std::uint64_t>();
        for (const auto& j : p.at("paths"))
            set.paths.push_back({j.at("wind_error").get<std::vector<double>>(),
                                 j.at("price_error").get<std::vector<double>>()});
        return set;
    });
}

Instance load_instance(const fs::path& path) {
    const json j = parse_json_text(read_file(path), path.string());
    const fs::path dir = path.parent_path();
    try {
        Instance inst;
        inst.name = j.value("name", path.stem().string());
        inst.spec.r_max_mwh = j.at("r_max_mwh").get<double>();
        inst.spec.eta = j.value("eta", 1.0);
        const double rho = j.value("rho_kwh", 0.0);
        inst.spec.rho_ch_kwh = j.value("rho_ch_kwh", rho);
        inst.spec.rho_dch_kwh = j.value("rho_dch_kwh", rho);
        inst.spec.r_levels = j.contains("r_levels")
                                 ? j.at("r_levels").get<int>()
                                 : default_battery_levels(inst.spec.r_max_mwh,
                                                          std::max(inst.spec.rho_ch_kwh, inst.spec.rho_dch_kwh));
        inst.spec.validate();

        const TimedColumn load = load_timed_column(dir / j.at("load_csv").get<std::string>(), "load_kw");
        const TimedColumn wind = load_timed_column(dir / j.at("wind_forecast_csv").get<std::string>(), "forecast_kw");
        const int horizon = j.value("horizon", static_cast<int>(load.values.size()) - 1);
        const auto n = static_cast<std::size_t>(horizon) + 1;
        if (horizon < 1 || load.values.size() < n || wind.values.size() < n)
            throw InputError(path.string() + ": series shorter than horizon + 1");
        if (wind.timestamps.front() != load.timestamps.front())
            throw InputError(path.string() + ": load and forecast start at different times");

        Scenario& sc = inst.scenario;
        sc.horizon = horizon;
        sc.load_kw.assign(load.values.begin(), load.values.begin() + n);
        sc.wind_forecast_kw.assign(wind.values.begin(), wind.values.begin() + n);
        sc.initial_level = j.value("initial_level", 0);
        sc.initial_wind_error = j.value("initial_wind_error", 0.0);
        sc.initial_price_error = j.value("initial_price_error", 0.0);
        if (j.contains("wind_values")) sc.wind_values = grid_from(j.at("wind_values"));
        if (j.contains("price_values")) sc.price_values = grid_from(j.at("price_values"));
        const auto since_midnight = ((load.timestamps.front() % 86400) + 86400) % 86400;
        inst.first_slot = static_cast<int>(since_midnight / kStepSeconds);
        if (j.contains("temperature_csv")) {
            const TimedColumn temp = load_timed_column(dir / j.at("temperature_csv").get<std::string>(), "temperature");
            if (temp.values.size() < n) throw InputError(path.string() + ": temperature series too short");
            inst.temperature.assign(temp.values.begin(), temp.values.begin() + n);
        }
        inst.temperature_class = j.value("temperature_class", 0);
        if (j.contains("price_reference_csv")) {
            const TimedColumn ref = load_timed_column(dir / j.at("price_reference_csv").get<std::string>(), "reference");
            if (ref.values.size() < n) throw InputError(path.string() + ": price reference too short");
            sc.price_reference.assign(ref.values.begin(), ref.values.begin() + n);
            inst.has_price_reference = true;
        }
        return inst;
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void complete_scenario(Instance& inst, const StoredModel& price_model) {
    Scenario& sc = inst.scenario;
    const auto n = static_cast<std::size_t>(sc.horizon) + 1;
    const bool seasonal = price_model.is_hsmm() && price_model.hsmm.price.has_value();
    if (!inst.has_price_reference) {
        if (!seasonal) throw InputError("instance has no price reference and the price model carries none");
        sc.price_reference.resize(n);
        for (std::size_t t = 0; t < n; ++t)
            sc.price_reference[t] = price_model.hsmm.price->reference(inst.first_slot + static_cast<int>(t));
    }
    const int classes = price_model.is_hsmm() ? price_model.hsmm.num_conditions : 1;
    if (!inst.temperature.empty() && seasonal) {
        sc.price_conditions = price_conditions(price_model.hsmm, inst.temperature);
    } else {
        if (inst.temperature_class < 0 || inst.temperature_class >= kTemperatureConditions)
            throw InputError("temperature_class must be in [0, 6)");
        sc.price_conditions.assign(n, classes > 1 ? inst.temperature_class : 0);
    }
    sc.validate();
}

void SyntheticSpec::validate() const {
    if (days < 1) throw InputError("days must be >= 1");
    for (double v : {up_mean_run, down_mean_run, price_up_mean_run, price_down_mean_run})
        if (!(v >= 1.0)) throw InputError("mean run lengths must be >= 1");
    for (double v : {up_dispersion, down_dispersion, price_dispersion, wind_max, price_noise + 1.0, wind_noise + 1.0,
                     temperature_trend_days})
        if (!(v > 0.0)) throw InputError("scales must be > 0");
    for (double v : {wind_base_amplitude, wind_amplitude_per_step, wind_amplitude_cap, price_base_amplitude,
                     price_amplitude_per_step, price_amplitude_cap, spike_magnitude, wind_noise, price_noise})
        if (!(v >= 0.0)) throw InputError("amplitudes must be >= 0");
    if (spike_probability.size() != static_cast<std::size_t>(kTemperatureConditions))
        throw InputError("spike_probability needs one entry per temperature condition");
    for (double p : spike_probability)
        if (!(p >= 0.0 && p <= 1.0)) throw InputError("probabilities must be in [0, 1]");
}

SyntheticSpec parse_synthetic_spec(const std::string& text) {
    const json j = parse_json_text(text, "synthetic spec");
    SyntheticSpec s;
    try {
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
        };
        get("days", s.days);
        get("seed", s.seed);
        get("start", s.start);
        if (j.contains("start_iso")) s.start = parse_iso8601(j.at("start_iso").get<std::string>());
        get("wind_forecast_mean", s.wind_forecast_mean);
        get("wind_forecast_swing", s.wind_forecast_swing);
        get("wind_max", s.wind_max);
        get("up_mean_run", s.up_mean_run);
        get("up_dispersion", s.up_dispersion);
        get("down_mean_run", s.down_mean_run);
        get("down_dispersion", s.down_dispersion);
        get("wind_base_amplitude", s.wind_base_amplitude);
        get("wind_amplitude_per_step", s.wind_amplitude_per_step);
        get("wind_amplitude_cap", s.wind_amplitude_cap);
        get("wind_noise", s.wind_noise);
        get("price_mean", s.price_mean);
        get("price_daily_swing", s.price_daily_swing);
        get("price_up_mean_run", s.price_up_mean_run);
        get("price_down_mean_run", s.price_down_mean_run);
        get("price_dispersion", s.price_dispersion);
        get("price_base_amplitude", s.price_base_amplitude);
        get("price_amplitude_per_step", s.price_amplitude_per_step);
        get("price_amplitude_cap", s.price_amplitude_cap);
        get("price_noise", s.price_noise);
        get("spike_probability", s.spike_probability);
        get("spike_magnitude", s.spike_magnitude);
        get("temperature_mean", s.temperature_mean);
        get("temperature_daily_swing", s.temperature_daily_swing);
        get("temperature_trend_swing", s.temperature_trend_swing);
        get("temperature_trend_days", s.temperature_trend_days);
        for (const auto& [key, _] : j.items()) {
            static const std::vector<std::string> known = {
                "days", "seed", "start", "start_iso", "wind_forecast_mean", "wind_forecast_swing", "wind_max",
                "up_mean_run", "up_dispersion", "down_mean_run", "down_dispersion", "wind_base_amplitude",
                "wind_amplitude_per_step", "wind_amplitude_cap", "wind_noise", "price_mean", "price_daily_swing",
                "price_up_mean_run", "price_down_mean_run", "price_dispersion", "price_base_amplitude",
                "price_amplitude_per_step", "price_amplitude_cap", "price_noise", "spike_probability",
                "spike_magnitude", "temperature_mean", "temperature_daily_swing", "temperature_trend_swing",
                "temperature_trend_days"};
            if (std::find(known.begin(), known.end(), key) == known.end())
                throw InputError("unknown synthetic spec field '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("synthetic spec: ") + e.what());
    }
    s.validate();
    return s;
}

double run_length_pmf(double mean, double size, int d) {
    if (d < 1) return 0.0;
    const double m = mean - 1.0;
    if (m <= 0.0) return d == 1 ? 1.0 : 0.0;
    const int k = d - 1;
    const double p = size / (size + m);
    return std::exp(std::lgamma(k + size) - std::lgamma(size) - std::lgamma(k + 1.0) + size * std::log(p) +
                    k * std::log1p(-p));
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const int count = spec.days * kStepsPerDay;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    SyntheticData out;

    std::vector<std::int64_t> stamps(count);
    for (int t = 0; t < count; ++t) stamps[t] = spec.start + static_cast<std::int64_t>(t) * kStepSeconds;
    const int first_slot = static_cast<int>((((spec.start % 86400) + 86400) % 86400) / kStepSeconds);

    // wind: smooth forecast plus alternating crossing runs
    {
        Rng rng(spec.seed, 11);
        RunGenerator gen{RunLaw(spec.up_mean_run, spec.up_dispersion), RunLaw(spec.down_mean_run, spec.down_dispersion),
                         spec.wind_base_amplitude, spec.wind_amplitude_per_step, spec.wind_amplitude_cap,
                         spec.wind_noise, 60.0};
        std::vector<double> errors;
        gen.fill(count, rng, errors, out.wind_run_lengths, out.wind_run_signs);
        TrainingSeries& w = out.wind;
        w.timestamps = stamps;
        for (int t = 0; t < count; ++t) {
            const double slot = (first_slot + t) % kStepsPerDay;
            const double f = spec.wind_forecast_mean + spec.wind_forecast_swing * std::sin(two_pi * slot / kStepsPerDay) +
                             0.3 * spec.wind_forecast_swing * std::sin(two_pi * t / (kStepsPerDay * 3.7));
            const double forecast = std::clamp(f, 0.0, spec.wind_max);
            w.reference.push_back(forecast);
            w.actual.push_back(std::clamp(forecast + errors[t], 0.0, spec.wind_max));
        }
    }

    // temperature, then price with condition-dependent spikes
    {
        Rng rng(spec.seed, 12);
        std::vector<double> temp(count);
        double wobble = 0.0;
        for (int t = 0; t < count; ++t) {
            const double slot = (first_slot + t) % kStepsPerDay;
            wobble = 0.98 * wobble + 0.2 * rng.normal();
            temp[t] = spec.temperature_mean +
                      spec.temperature_daily_swing * std::sin(two_pi * (slot - 96.0) / kStepsPerDay) +
                      spec.temperature_trend_swing * std::sin(two_pi * t / (kStepsPerDay * spec.temperature_trend_days)) +
                      wobble;
        }
        const std::vector<int> cond = temperature_features(temp).conditions();

        Rng prng(spec.seed, 13);
        RunGenerator gen{RunLaw(spec.price_up_mean_run, spec.price_dispersion),
                         RunLaw(spec.price_down_mean_run, spec.price_dispersion),
                         spec.price_base_amplitude, spec.price_amplitude_per_step, spec.price_amplitude_cap,
                         spec.price_noise, 1.2};
        std::vector<double> errors;
        gen.fill(count, prng, errors, out.price_run_lengths, out.price_run_signs);
        Rng spikes(spec.seed, 14);
        TrainingSeries& p = out.price;
        p.timestamps = stamps;
        p.temperature = temp;
        for (int t = 0; t < count; ++t) {
            const double slot = (first_slot + t) % kStepsPerDay;
            const double ref = spec.price_mean - spec.price_daily_swing * std::cos(two_pi * (slot - 30.0) / kStepsPerDay);
            double e = errors[t];
            const double u = spikes.uniform();
            const double size = spikes.uniform();
            if (u < spec.spike_probability[cond[t]]) e += spec.spike_magnitude * (1.0 + size);
            p.reference.push_back(ref);
            p.actual.push_back(ref + e);
        }
    }

    json truth;
    truth["wind"] = {{"up", {{"mean", spec.up_mean_run}, {"size", spec.up_dispersion}}},
                     {"down", {{"mean", spec.down_mean_run}, {"size", spec.down_dispersion}}},
                     {"amplitude",
                      {{"base", spec.wind_base_amplitude},
                       {"per_step", spec.wind_amplitude_per_step},
                       {"cap", spec.wind_amplitude_cap}}},
                     {"run_lengths", out.wind_run_lengths},
                     {"run_signs", out.wind_run_signs}};
    truth["price"] = {{"up", {{"mean", spec.price_up_mean_run}, {"size", spec.price_dispersion}}},
                      {"down", {{"mean", spec.price_down_mean_run}, {"size", spec.price_dispersion}}},
                      {"spike_probability", spec.spike_probability},
                      {"spike_magnitude", spec.spike_magnitude}};
    truth["run_law"] = "D = 1 + NegativeBinomial(size, mean - 1); consecutive runs alternate sign";
    truth["seed"] = spec.seed;
    out.ground_truth_json = truth.dump(1);
    return out;
}

}  // namespace hsadp
