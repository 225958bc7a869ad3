// Run configuration for the command-line front end: an INI file with
// [memory] [alphabet] [benchmark] [epr] [calibration] [output] [run]
// sections. Unknown sections or keys are errors.

#pragma once

#include "cvmem/benchmark.hpp"
#include "cvmem/fidelity.hpp"
#include "cvmem/memory.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace cvmem::app {

/// Bad values or unknown keys; exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable files; exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

enum class StoredPairNoise {
    measured,  ///< squeezed-vacuum noise at phi = 0
    preset,    ///< the memory section's S_x, S_p
};

struct BenchmarkConfig {
    GainMode gain_mode = GainMode::free;
    int restarts = 5;
    int max_evaluations = 2000;
    bool seesaw = true;
    std::vector<double> seesaw_d_max{3.8};
    int grid_nodes = 8;
    int phases = 8;
    int cutoff = -1;
};

struct RunConfig {
    std::string preset = "paper-2010";
    MemoryParams memory = paper_2010_preset();
    std::vector<double> d_max{0.0, 3.8, 7.6};
    double s = experiment_squeezing;
    std::vector<double> phases{0.0, 90.0};
    BenchmarkConfig benchmark;
    StoredPairNoise stored_pair_noise = StoredPairNoise::measured;
    std::vector<double> injected_means{1.0, 2.0, 5.0};
    std::filesystem::path out_dir = "out";
    OutputFormat format = OutputFormat::csv;
    std::uint64_t seed = 1;

    Alphabet alphabet(double d) const { return {d, s, phases}; }

    void validate() const {
        try {
            memory.validate();
            if (d_max.empty()) throw ConfigError("alphabet.d_max must not be empty");
            for (const double d : d_max) {
                if (!(d >= 0.0)) throw ConfigError("alphabet.d_max entries must be >= 0");
            }
            alphabet(0.0).validate();
            if (benchmark.restarts < 1 || benchmark.max_evaluations < 1) {
                throw ConfigError("benchmark.restarts and benchmark.max_evaluations must be >= 1");
            }
            if (benchmark.grid_nodes < 1 || benchmark.phases < 1) {
                throw ConfigError("benchmark.grid_nodes and benchmark.phases must be >= 1");
            }
            for (const double d : benchmark.seesaw_d_max) {
                if (!(d >= 0.0)) throw ConfigError("benchmark.seesaw_d_max entries must be >= 0");
            }
            if (injected_means.empty()) throw ConfigError("calibration.injected must not be empty");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
};

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
    return out;
}

inline long long parse_int(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError(key + ": not an integer: '" + v + "'");
    }
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false");
}

/// Comma-separated numbers; an empty value gives an empty list.
inline std::vector<double> parse_list(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    const std::string v = trim(raw);
    if (v.empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    return out;
}

}  // namespace detail

inline OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("format must be csv or json, got '" + s + "'");
}

inline std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

inline RunConfig default_config() { return {}; }

/// Parses INI text. Memory keys override the chosen preset; the feedback
/// gain defaults to its optimum for the final Z2 and kappa.
inline RunConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    static const std::map<std::string, std::set<std::string>> known{
        {"memory",
         {"preset", "Z2", "kappa", "g", "var_xA_init", "var_pA_init", "var_Sx", "var_Sp", "eta_loss", "eta_ent",
          "eta_det"}},
        {"alphabet", {"d_max", "s", "phases"}},
        {"benchmark",
         {"gain_mode", "restarts", "max_evaluations", "seesaw", "seesaw_d_max", "grid_nodes", "phases", "cutoff"}},
        {"epr", {"stored_pair_noise"}},
        {"calibration", {"injected"}},
        {"output", {"dir", "format"}},
        {"run", {"seed"}},
    };
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end()) throw ConfigError("config: unknown section [" + section + "]");
        if (!body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
        for (const auto& [key, value] : body) {
            if (!it->second.contains(key)) throw ConfigError("config: unknown key " + section + "." + key);
        }
    }

    auto get = [&](const std::string& path) { return tree.get_optional<std::string>(pt::ptree::path_type(path, '.')); };

    RunConfig cfg;
    if (auto v = get("memory.preset")) {
        cfg.preset = detail::trim(*v);
        const auto p = memory_preset(cfg.preset);
        if (!p) throw ConfigError("memory.preset: unknown preset '" + cfg.preset + "'");
        cfg.memory = *p;
    }
    MemoryParams& m = cfg.memory;
    const struct {
        const char* key;
        double* target;
    } fields[] = {
        {"memory.Z2", &m.Z2},
        {"memory.kappa", &m.kappa},
        {"memory.var_xA_init", &m.var_xA_init},
        {"memory.var_pA_init", &m.var_pA_init},
        {"memory.var_Sx", &m.var_Sx},
        {"memory.var_Sp", &m.var_Sp},
        {"memory.eta_loss", &m.losses.eta_loss},
        {"memory.eta_ent", &m.losses.eta_ent},
        {"memory.eta_det", &m.losses.eta_det},
    };
    for (const auto& f : fields) {
        if (auto v = get(f.key)) *f.target = detail::parse_double(f.key, *v);
    }
    if (auto v = get("memory.g")) {
        m.g = detail::parse_double("memory.g", *v);
    } else {
        try {
            m.g = optimal_gain(m);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("memory: ") + e.what());
        }
    }

    if (auto v = get("alphabet.d_max")) cfg.d_max = detail::parse_list("alphabet.d_max", *v);
    if (auto v = get("alphabet.s")) cfg.s = detail::parse_double("alphabet.s", *v);
    if (auto v = get("alphabet.phases")) cfg.phases = detail::parse_list("alphabet.phases", *v);

    BenchmarkConfig& b = cfg.benchmark;
    if (auto v = get("benchmark.gain_mode")) {
        const std::string mode = detail::trim(*v);
        if (mode == "free") {
            b.gain_mode = GainMode::free;
        } else if (mode == "matched") {
            b.gain_mode = GainMode::matched;
        } else {
            throw ConfigError("benchmark.gain_mode must be free or matched");
        }
    }
    if (auto v = get("benchmark.restarts")) b.restarts = static_cast<int>(detail::parse_int("benchmark.restarts", *v));
    if (auto v = get("benchmark.max_evaluations")) {
        b.max_evaluations = static_cast<int>(detail::parse_int("benchmark.max_evaluations", *v));
    }
    if (auto v = get("benchmark.seesaw")) b.seesaw = detail::parse_bool("benchmark.seesaw", *v);
    if (auto v = get("benchmark.seesaw_d_max")) b.seesaw_d_max = detail::parse_list("benchmark.seesaw_d_max", *v);
    if (auto v = get("benchmark.grid_nodes")) b.grid_nodes = static_cast<int>(detail::parse_int("benchmark.grid_nodes", *v));
    if (auto v = get("benchmark.phases")) b.phases = static_cast<int>(detail::parse_int("benchmark.phases", *v));
    if (auto v = get("benchmark.cutoff")) b.cutoff = static_cast<int>(detail::parse_int("benchmark.cutoff", *v));

    if (auto v = get("epr.stored_pair_noise")) {
        const std::string mode = detail::trim(*v);
        if (mode == "measured") {
            cfg.stored_pair_noise = StoredPairNoise::measured;
        } else if (mode == "preset") {
            cfg.stored_pair_noise = StoredPairNoise::preset;
        } else {
            throw ConfigError("epr.stored_pair_noise must be measured or preset");
        }
    }
    if (auto v = get("calibration.injected")) cfg.injected_means = detail::parse_list("calibration.injected", *v);
    if (auto v = get("output.dir")) cfg.out_dir = detail::trim(*v);
    if (auto v = get("output.format")) cfg.format = parse_format(detail::trim(*v));
    if (auto v = get("run.seed")) {
        const long long seed = detail::parse_int("run.seed", *v);
        if (seed < 0) throw ConfigError("run.seed must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(seed);
    }

    cfg.validate();
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    return parse_config(in);
}

}  // namespace cvmem::app
