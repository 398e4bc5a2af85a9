#include "otfsma/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "otfsma/estimation.hpp"

namespace otfsma {

using json = nlohmann::ordered_json;

std::string to_string(Waveform w) {
    switch (w) {
        case Waveform::OtfsMa: return "otfsma";
        case Waveform::Ofdma: return "ofdma";
        case Waveform::ScFdma: return "scfdma";
    }
    return "unknown";
}

Waveform waveform_from_string(const std::string& s) {
    if (s == "otfs" || s == "otfsma" || s == "otfs-ma") return Waveform::OtfsMa;
    if (s == "ofdma") return Waveform::Ofdma;
    if (s == "scfdma" || s == "sc-fdma") return Waveform::ScFdma;
    throw ConfigError("unknown waveform '" + s + "' (expected otfsma, ofdma or scfdma)");
}

namespace {

std::string mapping_name(SubcarrierMapping m) { return m == SubcarrierMapping::Localized ? "localized" : "interleaved"; }

SubcarrierMapping mapping_from_string(const std::string& s) {
    if (s == "localized") return SubcarrierMapping::Localized;
    if (s == "interleaved") return SubcarrierMapping::Interleaved;
    throw ConfigError("unknown subcarrier mapping '" + s + "' (expected localized or interleaved)");
}

// Reads typed fields out of a JSON object, collecting every problem instead of stopping.
class Reader {
public:
    Reader(const json& j, std::string path, std::vector<std::string>& errors)
        : j_(j), path_(std::move(path)), errors_(errors) {
        if (!j_.is_object()) errors_.push_back(where("") + "must be an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.is_object() || !j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            errors_.push_back(where(key) + "has the wrong type");
        }
    }

    template <typename T, typename Parse>
    void get_enum(const char* key, T& out, Parse parse) {
        std::string s;
        const std::size_t before = errors_.size();
        seen_.insert(key);
        if (!j_.is_object() || !j_.contains(key)) return;
        get(key, s);
        if (errors_.size() != before) return;
        try {
            out = parse(s);
        } catch (const std::exception& e) {
            errors_.push_back(where(key) + e.what());
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        if (!j_.is_object() || !j_.contains(key)) return nullptr;
        return &j_.at(key);
    }

    void reject_unknown() {
        if (!j_.is_object()) return;
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.count(k)) errors_.push_back(where(k) + "is not a recognized key");
        }
    }

private:
    std::string where(const std::string& key) const {
        const std::string p = key.empty() ? path_ : (path_.empty() ? key : path_ + "." + key);
        return "'" + (p.empty() ? std::string("<root>") : p) + "' ";
    }

    const json& j_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

ChannelProfile ExperimentConfig::profile() const {
    ChannelProfile p;
    for (double d : delays_us) p.delays_s.push_back(d * 1e-6);
    p.pdp_decay_s = pdp_decay_us * 1e-6;
    p.nu_max_hz = nu_max_hz;
    return p;
}

Alphabet ExperimentConfig::make_alphabet() const { return Alphabet::from_name(alphabet); }

std::pair<int, int> ExperimentConfig::interleaving() const {
    if (g1 > 0 && g2 > 0) return {g1, g2};
    if (g1 > 0) return {g1, K_u % g1 == 0 ? K_u / g1 : 0};
    if (g2 > 0) return {K_u % g2 == 0 ? K_u / g2 : 0, g2};
    if (K_u % 2 == 0) return {2, K_u / 2};
    return {K_u, 1};
}

int ExperimentConfig::resolved_cp_len() const { return cp_len >= 0 ? cp_len : profile().max_delay_index(grid); }

int ExperimentConfig::resolved_alpha_max() const {
    return alpha_max >= 0 ? alpha_max : profile().max_delay_index(grid);
}

MpConfig ExperimentConfig::mp_config(double noise_var) const {
    MpConfig c;
    c.n_max = mp_n_max;
    c.delta = mp_delta;
    c.epsilon = mp_epsilon;
    // a noiseless point still needs a finite likelihood width
    c.noise_var = std::max(noise_var, 1e-10);
    return c;
}

std::vector<std::string> ExperimentConfig::violations() const {
    std::vector<std::string> v;
    auto check = [&](auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            v.emplace_back(e.what());
        }
    };

    bool grid_ok = true;
    if (grid.N < 1 || grid.M < 1) {
        v.push_back("grid: N and M must be >= 1");
        grid_ok = false;
    }
    if (!(grid.delta_f > 0.0)) {
        v.push_back("grid: delta_f_hz must be positive");
        grid_ok = false;
    }
    if (K_u < 1) v.push_back("K_u must be >= 1");

    if (grid_ok && K_u >= 1) {
        if (waveform == Waveform::OtfsMa) {
            const auto [a, b] = interleaving();
            check([&] { make_plan(scheme, grid, K_u, a, b); });
        } else if (grid.M % K_u != 0) {
            v.push_back(to_string(waveform) + ": K_u=" + std::to_string(K_u) + " does not divide M=" +
                        std::to_string(grid.M));
        }
    }

    check([&] { make_alphabet(); });
    if (grid_ok) check([&] { profile().validate(grid); });
    if (pdp_decay_us < 0.0) v.push_back("channel: pdp_decay_us must be nonnegative");

    if (detector == DetectorKind::MP) check([&] { mp_config(1.0).validate(); });
    if (max_search_bits < 1) v.push_back("detector: max_search_bits must be >= 1");
    if (support_threshold < 0.0 || support_threshold >= 1.0) v.push_back("detector: support_threshold must be in [0, 1)");

    if (waveform != Waveform::OtfsMa && grid_ok && !delays_us.empty()) {
        const int need = profile().max_delay_index(grid);
        if (resolved_cp_len() < need) {
            v.push_back("baseline: cp_len=" + std::to_string(resolved_cp_len()) +
                        " is shorter than the largest tap delay index " + std::to_string(need));
        }
        if (resolved_cp_len() > grid.M) v.push_back("baseline: cp_len must not exceed M");
    }

    for (double s : snr_db)
        if (std::isnan(s)) v.push_back("snr_db: entries must be numbers or \"inf\"");
    for (double s : pilot_snr_db)
        if (std::isnan(s)) v.push_back("estimation.pilot_snr_db: entries must be numbers or \"inf\"");

    if (!pilot_snr_db.empty()) {
        if (waveform != Waveform::OtfsMa) v.push_back("estimation: pilot estimation is defined for otfsma only");
        if (grid_ok && K_u >= 1) check([&] { place_pilots(scheme, grid, K_u, resolved_alpha_max()); });
        if (grid_ok && !delays_us.empty() && resolved_alpha_max() < profile().max_delay_index(grid)) {
            v.push_back("estimation: alpha_max=" + std::to_string(resolved_alpha_max()) +
                        " is below the largest tap delay index " + std::to_string(profile().max_delay_index(grid)));
        }
        if (mse_trials < 1) v.push_back("estimation: trials must be >= 1");
        if (estimate_threshold < 0.0) v.push_back("estimation: threshold must be nonnegative");
    }

    if (min_frames < 1) v.push_back("stopping: min_frames must be >= 1");
    if (max_frames < min_frames) v.push_back("stopping: max_frames must be >= min_frames");
    if (target_errors < 1) v.push_back("stopping: target_errors must be >= 1");
    if (batch_frames < 1) v.push_back("stopping: batch_frames must be >= 1");
    return v;
}

void ExperimentConfig::validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::string msg = "invalid configuration (" + std::to_string(v.size()) + " problem" + (v.size() > 1 ? "s" : "") + "):";
    for (const auto& s : v) msg += "\n  - " + s;
    throw ConfigError(msg);
}

namespace {

json snr_list(const std::vector<double>& v) {
    json a = json::array();
    for (double s : v) {
        if (std::isinf(s)) a.push_back("inf");
        else a.push_back(s);
    }
    return a;
}

void read_snr_list(const json* j, const std::string& path, std::vector<double>& out, std::vector<std::string>& errors) {
    if (!j) return;
    if (!j->is_array()) {
        errors.push_back("'" + path + "' must be an array");
        return;
    }
    out.clear();
    for (const auto& e : *j) {
        if (e.is_number()) out.push_back(e.get<double>());
        else if (e.is_string() && (e.get<std::string>() == "inf" || e.get<std::string>() == "+inf"))
            out.push_back(std::numeric_limits<double>::infinity());
        else {
            errors.push_back("'" + path + "' entries must be numbers or \"inf\"");
            return;
        }
    }
}

}  // namespace

std::string ExperimentConfig::to_json() const {
    json j;
    j["config_version"] = kVersion;
    j["name"] = name;
    j["grid"] = {{"N", grid.N}, {"M", grid.M}, {"delta_f_hz", grid.delta_f}, {"carrier_freq_hz", grid.carrier_freq_hz}};
    j["waveform"] = to_string(waveform);
    j["scheme"] = to_string(scheme);
    j["K_u"] = K_u;
    j["g1"] = g1;
    j["g2"] = g2;
    j["alphabet"] = alphabet;
    j["channel"] = {{"delays_us", delays_us}, {"pdp_decay_us", pdp_decay_us}, {"nu_max_hz", nu_max_hz}};
    j["detector"] = {{"type", to_string(detector)},        {"max_search_bits", max_search_bits},
                     {"n_max", mp_n_max},                  {"delta", mp_delta},
                     {"epsilon", mp_epsilon},              {"support_threshold", support_threshold}};
    j["baseline"] = {{"cp_len", cp_len}, {"mapping", mapping_name(mapping)}};
    j["snr_db"] = snr_list(snr_db);
    j["estimation"] = {{"pilot_snr_db", snr_list(pilot_snr_db)},
                       {"alpha_max", alpha_max},
                       {"threshold", estimate_threshold},
                       {"trials", mse_trials},
                       {"chain_ber", chain_ber}};
    j["stopping"] = {{"min_frames", min_frames},
                     {"max_frames", max_frames},
                     {"target_errors", target_errors},
                     {"batch_frames", batch_frames}};
    j["seed"] = seed;
    return j.dump(2);
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_json()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return hex64(h);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig c;
    std::vector<std::string> errors;
    Reader root(j, "", errors);

    int version = 0;
    root.get("config_version", version);
    if (version != kVersion) errors.push_back("'config_version' must be " + std::to_string(kVersion));
    root.get("name", c.name);

    bool have_grid = false;
    if (const json* g = root.child("grid")) {
        have_grid = true;
        Reader r(*g, "grid", errors);
        int N = 0, M = 0;
        double df = 15e3, fc = 4e9;
        r.get("N", N);
        r.get("M", M);
        r.get("delta_f_hz", df);
        r.get("carrier_freq_hz", fc);
        r.reject_unknown();
        c.grid.N = N;
        c.grid.M = M;
        c.grid.delta_f = df;
        c.grid.T = df > 0.0 ? 1.0 / df : 0.0;
        c.grid.carrier_freq_hz = fc;
    }
    if (!have_grid) errors.push_back("'grid' is required");

    root.get_enum("waveform", c.waveform, waveform_from_string);
    root.get_enum("scheme", c.scheme, scheme_from_string);
    if (!j.is_object() || !j.contains("K_u")) errors.push_back("'K_u' is required");
    root.get("K_u", c.K_u);
    root.get("g1", c.g1);
    root.get("g2", c.g2);
    root.get("alphabet", c.alphabet);

    if (const json* ch = root.child("channel")) {
        Reader r(*ch, "channel", errors);
        r.get("delays_us", c.delays_us);
        r.get("pdp_decay_us", c.pdp_decay_us);
        r.get("nu_max_hz", c.nu_max_hz);
        r.reject_unknown();
    } else {
        errors.push_back("'channel' is required");
    }

    if (const json* d = root.child("detector")) {
        Reader r(*d, "detector", errors);
        r.get_enum("type", c.detector, detector_from_string);
        r.get("max_search_bits", c.max_search_bits);
        r.get("n_max", c.mp_n_max);
        r.get("delta", c.mp_delta);
        r.get("epsilon", c.mp_epsilon);
        r.get("support_threshold", c.support_threshold);
        r.reject_unknown();
    }

    if (const json* b = root.child("baseline")) {
        Reader r(*b, "baseline", errors);
        r.get("cp_len", c.cp_len);
        r.get_enum("mapping", c.mapping, mapping_from_string);
        r.reject_unknown();
    }

    read_snr_list(root.child("snr_db"), "snr_db", c.snr_db, errors);

    if (const json* e = root.child("estimation")) {
        Reader r(*e, "estimation", errors);
        read_snr_list(r.child("pilot_snr_db"), "estimation.pilot_snr_db", c.pilot_snr_db, errors);
        r.get("alpha_max", c.alpha_max);
        r.get("threshold", c.estimate_threshold);
        r.get("trials", c.mse_trials);
        r.get("chain_ber", c.chain_ber);
        r.reject_unknown();
    }

    if (const json* s = root.child("stopping")) {
        Reader r(*s, "stopping", errors);
        r.get("min_frames", c.min_frames);
        r.get("max_frames", c.max_frames);
        r.get("target_errors", c.target_errors);
        r.get("batch_frames", c.batch_frames);
        r.reject_unknown();
    }

    root.get("seed", c.seed);
    root.reject_unknown();

    if (!errors.empty()) {
        std::string msg = "invalid configuration (" + std::to_string(errors.size()) + " problem" +
                          (errors.size() > 1 ? "s" : "") + "):";
        for (const auto& s : errors) msg += "\n  - " + s;
        throw ConfigError(msg);
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

}  // namespace otfsma
