#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace illpose {

// Flat key=value settings. Values from an INI file land under "section.key";
// keys without a section, and keys in a section named after the experiment,
// are also visible unqualified.
class ExperimentConfig {
public:
    std::string experiment;
    std::string output_dir = "illpose_out";
    std::uint64_t seed = 12345;

    void set(const std::string& key, const std::string& value);
    // "key=value"; throws a config error otherwise
    void set_assignment(const std::string& assignment);
    void load_file(const std::string& path);
    bool has(const std::string& key) const;

    // Getters record the value they return, defaulted or not, for the report header.
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    // comma-separated list
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
    // lo:hi:step, inclusive of hi up to rounding
    std::vector<double> get_range(const std::string& key, const std::string& fallback) const;

    const std::vector<std::pair<std::string, std::string>>& used() const { return used_; }
    void clear_used() { used_.clear(); }
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    const std::string* find(const std::string& key) const;
    void record(const std::string& key, const std::string& value) const;

    std::map<std::string, std::string> values_;
    mutable std::vector<std::pair<std::string, std::string>> used_;
};

std::vector<double> parse_list(const std::string& text);
std::vector<double> parse_range(const std::string& text);

} // namespace illpose
