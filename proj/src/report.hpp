#pragma once

#include <string>
#include <utility>
#include <vector>

namespace illpose {

struct Verdict {
    std::string name;
    // the inequality being instantiated, in plain text
    std::string inequality;
    // descriptive label of the claim the check is tied to
    std::string reference;
    bool pass = false;
    std::vector<std::pair<std::string, double>> measured;
};

// One table plus scalar metrics and verdicts. Wall-clock time is kept out of
// every serialized form so reruns are byte-identical.
struct ExperimentReport {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<Verdict> verdicts;
    std::string grid_info;
    double wall_seconds = 0.0;

    bool passed() const;
    void add_config(const std::string& key, double value);
    void add_config(const std::string& key, const std::string& value);
    void add_metric(const std::string& key, double value);
    double metric(const std::string& key) const;
    Verdict& add_verdict(std::string name, std::string inequality, std::string reference, bool pass);
    // column values of a table; throws on an unknown name
    std::vector<double> column(const std::string& name) const;
};

std::string format_number(double v);
std::string report_csv(const ExperimentReport& r);
std::string report_summary(const ExperimentReport& r);
// Log-log line plot of the given y columns against x.
std::string report_svg(const ExperimentReport& r, const std::string& x, const std::vector<std::string>& ys);

// Writes <dir>/<experiment>.csv and <dir>/<experiment>_summary.txt.
void write_report(const ExperimentReport& r, const std::string& dir);

} // namespace illpose
