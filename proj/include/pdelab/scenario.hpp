#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdelab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key = value configuration with '#' comments.  Unknown keys are
// errors: every key must be consumed by the runner (fail-fast).
class ScenarioConfig {
  public:
    static ScenarioConfig from_file(const std::string& path);
    static ScenarioConfig from_string(const std::string& text, const std::string& origin = "<string>");

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long fallback) const;
    std::vector<double> get_list(const std::string& key) const;               // comma-separated
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fb) const;
    std::optional<double> get_optional(const std::string& key) const;

    // Throws listing any key never read by a getter.
    void ensure_all_consumed() const;

  private:
    std::string raw(const std::string& key) const;
    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> consumed_;
    std::string origin_ = "<empty>";
};

} // namespace pdelab
