#include "report.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace illpose {

bool ExperimentReport::passed() const
{
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

void ExperimentReport::add_config(const std::string& key, double value) { config.emplace_back(key, format_number(value)); }

void ExperimentReport::add_config(const std::string& key, const std::string& value) { config.emplace_back(key, value); }

void ExperimentReport::add_metric(const std::string& key, double value) { metrics.emplace_back(key, value); }

double ExperimentReport::metric(const std::string& key) const
{
    for (const auto& [k, v] : metrics)
        if (k == key) return v;
    fail(ErrorCode::invalid_argument, "unknown metric " + key);
}

Verdict& ExperimentReport::add_verdict(std::string name, std::string inequality, std::string reference, bool pass)
{
    verdicts.push_back({std::move(name), std::move(inequality), std::move(reference), pass, {}});
    return verdicts.back();
}

std::vector<double> ExperimentReport::column(const std::string& name) const
{
    auto it = std::find(columns.begin(), columns.end(), name);
    require(it != columns.end(), ErrorCode::invalid_argument, "unknown column " + name);
    const auto c = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(c));
    return out;
}

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string report_csv(const ExperimentReport& r)
{
    std::ostringstream os;
    os << "# experiment: " << r.experiment << '\n';
    if (!r.grid_info.empty()) os << "# grid: " << r.grid_info << '\n';
    for (const auto& [k, v] : r.config) os << "# " << k << " = " << v << '\n';
    for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
    os << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << '\n';
    }
    return os.str();
}

std::string report_summary(const ExperimentReport& r)
{
    std::ostringstream os;
    os << "experiment " << r.experiment << '\n';
    if (!r.grid_info.empty()) os << "grid " << r.grid_info << '\n';
    for (const auto& [k, v] : r.config) os << "config " << k << " = " << v << '\n';
    for (const auto& [k, v] : r.metrics) os << "metric " << k << " = " << format_number(v) << '\n';
    for (const auto& v : r.verdicts) {
        os << (v.pass ? "PASS " : "FAIL ") << v.name << " | " << v.inequality << " | " << v.reference;
        for (const auto& [k, x] : v.measured) os << " | " << k << "=" << format_number(x);
        os << '\n';
    }
    os << (r.passed() ? "overall PASS" : "overall FAIL") << '\n';
    return os.str();
}

std::string report_svg(const ExperimentReport& r, const std::string& x, const std::vector<std::string>& ys)
{
    const auto xs = r.column(x);
    std::vector<std::vector<double>> series;
    for (const auto& y : ys) series.push_back(r.column(y));
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0)) continue;
        xlo = std::min(xlo, std::log10(xs[i]));
        xhi = std::max(xhi, std::log10(xs[i]));
        for (const auto& s : series) {
            if (!(s[i] > 0) || !std::isfinite(s[i])) continue;
            ylo = std::min(ylo, std::log10(s[i]));
            yhi = std::max(yhi, std::log10(s[i]));
        }
    }
    if (!(xhi > xlo)) xhi = xlo + 1;
    if (!(yhi > ylo)) yhi = ylo + 1;
    const double W = 640, H = 420, pad = 50;
    auto px = [&](double v) { return pad + (std::log10(v) - xlo) / (xhi - xlo) * (W - 2 * pad); };
    auto py = [&](double v) { return H - pad - (std::log10(v) - ylo) / (yhi - ylo) * (H - 2 * pad); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << pad << "\" y=\"20\" font-size=\"14\">" << r.experiment << " (log-log)</text>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" font-size=\"12\">" << x << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[k % 5] << "\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (xs[i] > 0 && series[k][i] > 0 && std::isfinite(series[k][i]))
                os << format_number(px(xs[i])) << ',' << format_number(py(series[k][i])) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << W - 160 << "\" y=\"" << 40 + 16 * k << "\" font-size=\"12\" fill=\"" << colors[k % 5]
           << "\">" << ys[k] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_report(const ExperimentReport& r, const std::string& dir)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec, ErrorCode::io, "cannot create " + dir);
    auto put = [&](const std::string& name, const std::string& body) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        require(static_cast<bool>(f), ErrorCode::io, "cannot write " + name);
        f << body;
    };
    put(r.experiment + ".csv", report_csv(r));
    put(r.experiment + "_summary.txt", report_summary(r));
}

} // namespace illpose
