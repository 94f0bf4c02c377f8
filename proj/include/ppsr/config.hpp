#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppsr/image.hpp"  // write_file_atomic

namespace ppsr {

// Ordered plain-text key-value configuration: one "key = value" pair per
// line, '#' starts a comment, keys are dot-namespaced (e.g. "solver.gamma0").
// Doubles are written with 17 significant digits so a write/read round trip
// is exact; insertion order is preserved so serialization is deterministic.

class ConfigMap {
public:
    void set(const std::string& key, const std::string& value) {
        for (auto& kv : items_)
            if (kv.first == key) {
                kv.second = value;
                return;
            }
        items_.emplace_back(key, value);
    }

    void set_int(const std::string& key, long long v) { set(key, std::to_string(v)); }
    void set_u64(const std::string& key, std::uint64_t v) { set(key, std::to_string(v)); }
    void set_bool(const std::string& key, bool v) { set(key, v ? "true" : "false"); }

    void set_double(const std::string& key, double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        set(key, buf);
    }

    bool has(const std::string& key) const { return find(key) != nullptr; }

    const std::string& get(const std::string& key) const {
        const std::string* v = find(key);
        if (!v) throw std::runtime_error("config: missing key '" + key + "'");
        return *v;
    }

    std::string get_or(const std::string& key, const std::string& def) const {
        const std::string* v = find(key);
        return v ? *v : def;
    }

    long long get_int(const std::string& key) const { return parse_int(key, get(key)); }
    long long get_int_or(const std::string& key, long long def) const {
        const std::string* v = find(key);
        return v ? parse_int(key, *v) : def;
    }

    std::uint64_t get_u64(const std::string& key) const { return parse_u64(key, get(key)); }
    std::uint64_t get_u64_or(const std::string& key, std::uint64_t def) const {
        const std::string* v = find(key);
        return v ? parse_u64(key, *v) : def;
    }

    double get_double(const std::string& key) const { return parse_double(key, get(key)); }
    double get_double_or(const std::string& key, double def) const {
        const std::string* v = find(key);
        return v ? parse_double(key, *v) : def;
    }

    bool get_bool(const std::string& key) const { return parse_bool(key, get(key)); }
    bool get_bool_or(const std::string& key, bool def) const {
        const std::string* v = find(key);
        return v ? parse_bool(key, *v) : def;
    }

    const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

private:
    const std::string* find(const std::string& key) const {
        for (const auto& kv : items_)
            if (kv.first == key) return &kv.second;
        return nullptr;
    }

    static long long parse_int(const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key + "' is not an integer: '" + s + "'");
        }
    }

    static std::uint64_t parse_u64(const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const unsigned long long v = std::stoull(s, &pos);
            if (pos != s.size() || (!s.empty() && s[0] == '-')) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key + "' is not an unsigned integer: '" +
                                     s + "'");
        }
    }

    static double parse_double(const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key + "' is not a number: '" + s + "'");
        }
    }

    static bool parse_bool(const std::string& key, const std::string& s) {
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
        throw std::runtime_error("config: key '" + key + "' is not a boolean: '" + s + "'");
    }

    std::vector<std::pair<std::string, std::string>> items_;
};

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace detail

inline ConfigMap parse_config(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = detail::strip(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " is not 'key = value'");
        const std::string key = detail::strip(stripped.substr(0, eq));
        const std::string value = detail::strip(stripped.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config: line " + std::to_string(lineno) + " has an empty key");
        cfg.set(key, value);
    }
    return cfg;
}

inline std::string serialize_config(const ConfigMap& cfg) {
    std::string out;
    for (const auto& kv : cfg.items()) {
        out += kv.first;
        out += " = ";
        out += kv.second;
        out += "\n";
    }
    return out;
}

inline ConfigMap load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

inline void save_config_file(const ConfigMap& cfg, const std::string& path) {
    const std::string text = serialize_config(cfg);
    write_file_atomic(path, text.data(), text.size());
}

}  // namespace ppsr
