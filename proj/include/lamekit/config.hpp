#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lamekit/error.hpp"
#include "lamekit/snapshot.hpp"

// Flat configuration files:
//
//   # comment
//   material.rho = 1.0
//   time.dt = auto
//
// One key per line, dotted section prefixes, '#' starts a comment anywhere.
// Values keep their text until a command asks for a typed value; every error
// names the file and the key.

namespace lamekit {

class Config {
public:
    Config() = default;
    explicit Config(std::string source) : source_(std::move(source)) {}

    static Config parse(std::string_view text, const std::string& source) {
        Config cfg(source);
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t end = std::min(text.find('\n', pos), text.size());
            std::string line(text.substr(pos, end - pos));
            pos = end + 1;
            ++line_no;
            if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            const std::string where = source + ":" + std::to_string(line_no);
            if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
            const std::string key = trim(line.substr(0, eq));
            if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
            if (cfg.entries_.count(key)) throw ConfigError(where + ": key '" + key + "' is set twice");
            cfg.entries_[key] = Entry{trim(line.substr(eq + 1)), line_no};
        }
        return cfg;
    }

    static Config load(const std::filesystem::path& path) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw ConfigError("cannot read config file '" + path.string() + "'");
        std::ostringstream ss;
        ss << is.rdbuf();
        Config cfg = parse(ss.str(), path.string());
        cfg.base_dir_ = std::filesystem::absolute(path).parent_path();
        return cfg;
    }

    const std::string& source() const { return source_; }
    /// Directory relative paths in the file are resolved against.
    const std::filesystem::path& base_dir() const { return base_dir_; }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    bool has_section(const std::string& section) const {
        const std::string prefix = section + ".";
        return std::any_of(entries_.begin(), entries_.end(), [&](auto& e) { return e.first.rfind(prefix, 0) == 0; });
    }

    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        for (const auto& [k, e] : entries_) out.push_back(k);
        return out;
    }

    /// Overrides or adds a value; used for resolved settings like dt = auto.
    void set(const std::string& key, std::string value) {
        auto& e = entries_[key];
        e.value = std::move(value);
    }

    std::string get_string(const std::string& key) const { return require(key).value; }

    std::string get_string(const std::string& key, const std::string& fallback) {
        if (!has(key)) set(key, fallback);
        return get_string(key);
    }

    double get_double(const std::string& key) const {
        const auto& e = require(key);
        double v = 0.0;
        const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
        if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size() || !std::isfinite(v))
            throw error(key, "expected a finite number, got '" + e.value + "'");
        return v;
    }

    double get_double(const std::string& key, double fallback) {
        if (!has(key)) set(key, to_exact_string(fallback));
        return get_double(key);
    }

    long get_int(const std::string& key) const {
        const auto& e = require(key);
        long v = 0;
        const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
        if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size())
            throw error(key, "expected an integer, got '" + e.value + "'");
        return v;
    }

    long get_int(const std::string& key, long fallback) {
        if (!has(key)) set(key, std::to_string(fallback));
        return get_int(key);
    }

    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) set(key, std::to_string(fallback));
        const auto& e = require(key);
        std::uint64_t v = 0;
        const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
        if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size())
            throw error(key, "expected a non-negative integer, got '" + e.value + "'");
        return v;
    }

    bool get_bool(const std::string& key, bool fallback) {
        if (!has(key)) set(key, fallback ? "true" : "false");
        const std::string v = get_string(key);
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        throw error(key, "expected true or false, got '" + v + "'");
    }

    /// Integer that must lie in [lo, hi].
    long get_int_in(const std::string& key, long fallback, long lo, long hi) {
        const long v = get_int(key, fallback);
        if (v < lo || v > hi)
            throw error(key, "value " + std::to_string(v) + " is outside [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "]");
        return v;
    }

    double get_positive(const std::string& key) const {
        const double v = get_double(key);
        if (!(v > 0.0)) throw error(key, "must be positive, got " + get_string(key));
        return v;
    }

    double get_positive(const std::string& key, double fallback) {
        if (!has(key)) set(key, to_exact_string(fallback));
        return get_positive(key);
    }

    /// Path value resolved against the config file's directory.
    std::filesystem::path get_path(const std::string& key) const {
        std::filesystem::path p = get_string(key);
        if (p.empty()) throw error(key, "path is empty");
        if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
        return p.lexically_normal();
    }

    ConfigError error(const std::string& key, const std::string& what) const {
        const auto it = entries_.find(key);
        std::string where = "config '" + source_ + "'";
        if (it != entries_.end() && it->second.line > 0) where += " line " + std::to_string(it->second.line);
        return ConfigError(where + ", key '" + key + "': " + what);
    }

    /// Every key, sorted, one `key = value` per line.
    std::string dump(const std::string& heading = {}) const {
        std::ostringstream os;
        if (!heading.empty()) os << "# " << heading << '\n';
        for (const auto& [k, e] : entries_) os << k << " = " << e.value << '\n';
        return os.str();
    }

private:
    struct Entry {
        std::string value;
        std::size_t line = 0;  // 0 for values set programmatically
    };

    const Entry& require(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError("config '" + source_ + "': missing required key '" + key + "'");
        return it->second;
    }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static bool valid_key(const std::string& key) {
        if (key.empty() || key.front() == '.' || key.back() == '.') return false;
        for (std::size_t i = 0; i < key.size(); ++i) {
            const char c = key[i];
            if (c == '.' && key[i - 1] == '.') return false;
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
        }
        return true;
    }

    std::string source_ = "<memory>";
    std::filesystem::path base_dir_;
    std::map<std::string, Entry> entries_;
};

/// All keys any command understands. Keys outside this set are rejected so
/// that typos do not silently fall back to defaults.
inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k{
            "domain.n1", "domain.n2", "domain.n3", "domain.d", "domain.d1", "domain.d2", "domain.d3",
            "domain.origin1", "domain.origin2", "domain.origin3", "domain.boundary",
            "material.rho", "material.lambda", "material.mu", "material.E", "material.sigma",
            "time.dt", "time.n_steps", "time.record_every",
            "initial.kind", "initial.amplitude", "initial.kmax",
            "initial.p_k1", "initial.p_k2", "initial.p_k3", "initial.p_amplitude",
            "initial.s_k1", "initial.s_k2", "initial.s_k3", "initial.s_amplitude",
            "initial.s_pol1", "initial.s_pol2", "initial.s_pol3",
            "run.seed",
            "decompose.input", "decompose.prefix",
            "plate.a", "plate.b", "plate.points1", "plate.points2", "plate.thickness", "plate.modes",
            "plate.modes_max", "plate.dispersion_k_max", "plate.dispersion_points", "plate.time_domain",
            "plate.periods",
            "verify.suite", "verify.base_n", "verify.energy_steps",
            "tolerance.order_min", "tolerance.order_max", "tolerance.error_floor", "tolerance.speed_rel",
            "tolerance.kl_frequency_rel", "tolerance.plate_frequency_rel", "tolerance.energy_rel",
            "tolerance.recon_rel", "tolerance.div_rel", "tolerance.gauge_recon_rel", "tolerance.gauge_div_rel",
        };
        return k;
    }();
    return keys;
}

inline void reject_unknown_keys(const Config& cfg) {
    for (const auto& key : cfg.keys())
        if (!known_config_keys().count(key)) throw cfg.error(key, "unknown key");
}

} // namespace lamekit
