#include "pdelab/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pdelab {

namespace {
std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}
} // namespace

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str(), path);
}

ScenarioConfig ScenarioConfig::from_string(const std::string& text, const std::string& origin) {
    ScenarioConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.kv_.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key " + key);
        cfg.kv_[key] = value;
    }
    return cfg;
}

std::string ScenarioConfig::raw(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError(origin_ + ": missing required key " + key);
    consumed_.insert(key);
    return it->second;
}

std::string ScenarioConfig::get_string(const std::string& key) const { return raw(key); }

std::string ScenarioConfig::get_string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    return raw(key);
}

double ScenarioConfig::get_double(const std::string& key) const {
    const std::string v = raw(key);
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError(origin_ + ": key " + key + " is not a number: " + v);
    return out;
}

double ScenarioConfig::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return get_double(key);
}

long ScenarioConfig::get_int(const std::string& key) const {
    const double d = get_double(key);
    const long l = static_cast<long>(d);
    if (static_cast<double>(l) != d)
        throw ConfigError(origin_ + ": key " + key + " is not an integer");
    return l;
}

long ScenarioConfig::get_int(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    return get_int(key);
}

std::vector<double> ScenarioConfig::get_list(const std::string& key) const {
    const std::string v = raw(key);
    std::vector<double> out;
    std::istringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        char* end = nullptr;
        const double d = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw ConfigError(origin_ + ": key " + key + " has a non-numeric entry: " + tok);
        out.push_back(d);
    }
    if (out.empty()) throw ConfigError(origin_ + ": key " + key + " is an empty list");
    return out;
}

std::vector<double> ScenarioConfig::get_list(const std::string& key,
                                             const std::vector<double>& fb) const {
    if (!has(key)) return fb;
    return get_list(key);
}

std::optional<double> ScenarioConfig::get_optional(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_double(key);
}

void ScenarioConfig::ensure_all_consumed() const {
    std::string unknown;
    for (const auto& [k, v] : kv_)
        if (!consumed_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
    if (!unknown.empty())
        throw ConfigError(origin_ + ": unknown keys: " + unknown);
}

} // namespace pdelab
