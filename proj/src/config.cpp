#include "config.hpp"

#include "error.hpp"
#include "report.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>

namespace illpose {

namespace {

double to_number(const std::string& key, const std::string& text)
{
    try {
        return boost::lexical_cast<double>(boost::trim_copy(text));
    } catch (const boost::bad_lexical_cast&) {
        fail(ErrorCode::config, "setting " + key + " is not a number: " + text);
    }
}

std::string join(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
    return out;
}

} // namespace

std::vector<double> parse_list(const std::string& text)
{
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(","));
    std::vector<double> out;
    for (const auto& p : parts) {
        if (boost::trim_copy(p).empty()) continue;
        out.push_back(to_number("list", p));
    }
    require(!out.empty(), ErrorCode::config, "empty list: " + text);
    return out;
}

std::vector<double> parse_range(const std::string& text)
{
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(":"));
    require(parts.size() == 3, ErrorCode::config, "range must read lo:hi:step, got " + text);
    const double lo = to_number("range", parts[0]), hi = to_number("range", parts[1]),
                 step = to_number("range", parts[2]);
    require(step > 0.0 && hi >= lo, ErrorCode::config, "range needs lo <= hi and a positive step: " + text);
    const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    require(n < 1000000, ErrorCode::config, "range has too many points: " + text);
    std::vector<double> out;
    // round to the step's decimal grid so 0.1-type steps give clean values
    for (long i = 0; i <= n; ++i) out.push_back(std::round((lo + i * step) * 1e12) / 1e12);
    return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value)
{
    const auto k = boost::trim_copy(key);
    require(!k.empty(), ErrorCode::config, "empty setting name");
    values_[k] = boost::trim_copy(value);
}

void ExperimentConfig::set_assignment(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    require(eq != std::string::npos && eq > 0, ErrorCode::config, "expected key=value, got " + assignment);
    set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void ExperimentConfig::load_file(const std::string& path)
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        fail(ErrorCode::config, std::string("cannot parse ") + path + ": " + e.what());
    }
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            set(name, node.data());
            continue;
        }
        for (const auto& [key, leaf] : node) set(name + "." + key, leaf.data());
    }
    if (auto it = values_.find("experiment"); it != values_.end() && experiment.empty()) experiment = it->second;
    if (auto it = values_.find("output_dir"); it != values_.end()) output_dir = it->second;
    if (auto it = values_.find("seed"); it != values_.end())
        seed = static_cast<std::uint64_t>(to_number("seed", it->second));
}

const std::string* ExperimentConfig::find(const std::string& key) const
{
    if (auto it = values_.find(key); it != values_.end()) return &it->second;
    if (!experiment.empty())
        if (auto it = values_.find(experiment + "." + key); it != values_.end()) return &it->second;
    if (auto it = values_.find("general." + key); it != values_.end()) return &it->second;
    return nullptr;
}

bool ExperimentConfig::has(const std::string& key) const { return find(key) != nullptr; }

void ExperimentConfig::record(const std::string& key, const std::string& value) const
{
    auto it = std::find_if(used_.begin(), used_.end(), [&](const auto& kv) { return kv.first == key; });
    if (it == used_.end())
        used_.emplace_back(key, value);
    else
        it->second = value;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const
{
    const auto* v = find(key);
    const double out = v ? to_number(key, *v) : fallback;
    record(key, format_number(out));
    return out;
}

long ExperimentConfig::get_int(const std::string& key, long fallback) const
{
    const auto* v = find(key);
    double x = v ? to_number(key, *v) : static_cast<double>(fallback);
    require(std::floor(x) == x, ErrorCode::config, "setting " + key + " must be an integer");
    record(key, format_number(x));
    return static_cast<long>(x);
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const
{
    const auto* v = find(key);
    bool out = fallback;
    if (v) {
        const auto t = boost::to_lower_copy(*v);
        if (t == "1" || t == "true" || t == "yes" || t == "on")
            out = true;
        else if (t == "0" || t == "false" || t == "no" || t == "off")
            out = false;
        else
            fail(ErrorCode::config, "setting " + key + " is not a boolean: " + *v);
    }
    record(key, out ? "true" : "false");
    return out;
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const
{
    const auto* v = find(key);
    const std::string out = v ? *v : fallback;
    record(key, out);
    return out;
}

std::vector<double> ExperimentConfig::get_list(const std::string& key, const std::vector<double>& fallback) const
{
    const auto* v = find(key);
    const auto out = v ? parse_list(*v) : fallback;
    record(key, join(out));
    return out;
}

std::vector<double> ExperimentConfig::get_range(const std::string& key, const std::string& fallback) const
{
    const auto* v = find(key);
    const std::string text = v ? *v : fallback;
    record(key, text);
    return parse_range(text);
}

} // namespace illpose
