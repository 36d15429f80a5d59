#include "illpose/illpose.h"

#include "closed_forms.hpp"
#include "error.hpp"
#include "feasibility.hpp"
#include "harness.hpp"

#include <algorithm>
#include <exception>
#include <new>
#include <string>

struct illpose_config {
    illpose::ExperimentConfig cfg;
};

struct illpose_report {
    illpose::ExperimentReport report;
    std::string csv;
    std::string summary;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_message;

illpose_status to_status(illpose::ErrorCode c) { return static_cast<illpose_status>(static_cast<int>(c)); }

template <class F>
illpose_status guarded(F&& f)
{
    try {
        f();
        last_error.clear();
        return ILLPOSE_OK;
    } catch (const illpose::Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return ILLPOSE_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return ILLPOSE_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return ILLPOSE_ERR_INTERNAL;
    }
}

illpose_status null_arg(const char* what)
{
    last_error = std::string("null argument: ") + what;
    return ILLPOSE_ERR_INVALID_ARGUMENT;
}

} // namespace

extern "C" {

const char* illpose_last_error(void) { return last_error.c_str(); }

const char* illpose_status_name(illpose_status status)
{
    switch (status) {
    case ILLPOSE_OK: return "ok";
    case ILLPOSE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ILLPOSE_ERR_PRECONDITION: return "precondition";
    case ILLPOSE_ERR_WINDOW_OVERFLOW: return "window overflow";
    case ILLPOSE_ERR_BANDWIDTH_OVERFLOW: return "bandwidth overflow";
    case ILLPOSE_ERR_RESOLUTION: return "resolution";
    case ILLPOSE_ERR_NON_CONVERGENCE: return "non-convergence";
    case ILLPOSE_ERR_BLOWUP: return "blow-up";
    case ILLPOSE_ERR_CONFIG: return "configuration";
    case ILLPOSE_ERR_IO: return "i/o";
    case ILLPOSE_ERR_INFEASIBLE: return "infeasible";
    case ILLPOSE_ERR_NOT_FOUND: return "not found";
    case ILLPOSE_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* illpose_version(void) { return "1.0.0"; }

size_t illpose_experiment_count(void) { return illpose::experiment_names().size(); }

const char* illpose_experiment_name(size_t index)
{
    const auto& n = illpose::experiment_names();
    return index < n.size() ? n[index].c_str() : nullptr;
}

illpose_status illpose_config_new(const char* experiment, illpose_config** out)
{
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        auto* c = new illpose_config;
        if (experiment) c->cfg.experiment = experiment;
        *out = c;
    });
}

void illpose_config_free(illpose_config* cfg) { delete cfg; }

illpose_status illpose_config_set_experiment(illpose_config* cfg, const char* experiment)
{
    if (!cfg || !experiment) return null_arg("cfg or experiment");
    return guarded([&] { cfg->cfg.experiment = experiment; });
}

illpose_status illpose_config_set_output_dir(illpose_config* cfg, const char* dir)
{
    if (!cfg || !dir) return null_arg("cfg or dir");
    return guarded([&] { cfg->cfg.output_dir = dir; });
}

illpose_status illpose_config_set_seed(illpose_config* cfg, uint64_t seed)
{
    if (!cfg) return null_arg("cfg");
    cfg->cfg.seed = seed;
    last_error.clear();
    return ILLPOSE_OK;
}

illpose_status illpose_config_set(illpose_config* cfg, const char* key, const char* value)
{
    if (!cfg || !key || !value) return null_arg("cfg, key or value");
    return guarded([&] { cfg->cfg.set(key, value); });
}

illpose_status illpose_config_set_assignment(illpose_config* cfg, const char* assignment)
{
    if (!cfg || !assignment) return null_arg("cfg or assignment");
    return guarded([&] { cfg->cfg.set_assignment(assignment); });
}

illpose_status illpose_config_load(illpose_config* cfg, const char* path)
{
    if (!cfg || !path) return null_arg("cfg or path");
    return guarded([&] { cfg->cfg.load_file(path); });
}

const char* illpose_config_experiment(const illpose_config* cfg) { return cfg ? cfg->cfg.experiment.c_str() : nullptr; }

illpose_status illpose_run_experiment(const illpose_config* cfg, illpose_report** out)
{
    if (!cfg || !out) return null_arg("cfg or out");
    *out = nullptr;
    return guarded([&] {
        auto* r = new illpose_report;
        try {
            r->report = illpose::run_experiment(cfg->cfg);
            r->csv = illpose::report_csv(r->report);
            r->summary = illpose::report_summary(r->report);
        } catch (...) {
            delete r;
            throw;
        }
        *out = r;
    });
}

illpose_status illpose_run(const illpose_config* cfg, int* exit_code, const char** message)
{
    if (!cfg || !exit_code) return null_arg("cfg or exit_code");
    return guarded([&] {
        const auto outcome = illpose::run(cfg->cfg);
        *exit_code = outcome.exit_code;
        last_message = outcome.message;
        for (const auto& r : outcome.reports)
            last_message += "wrote " + outcome.output_dir + "/" + r.experiment + ".csv\n";
        if (message) *message = last_message.c_str();
    });
}

void illpose_report_free(illpose_report* report) { delete report; }

int illpose_report_passed(const illpose_report* report) { return report && report->report.passed() ? 1 : 0; }

const char* illpose_report_experiment(const illpose_report* report)
{
    return report ? report->report.experiment.c_str() : nullptr;
}

const char* illpose_report_csv(const illpose_report* report) { return report ? report->csv.c_str() : nullptr; }

const char* illpose_report_summary(const illpose_report* report) { return report ? report->summary.c_str() : nullptr; }

size_t illpose_report_verdict_count(const illpose_report* report) { return report ? report->report.verdicts.size() : 0; }

const char* illpose_report_verdict_name(const illpose_report* report, size_t index)
{
    if (!report || index >= report->report.verdicts.size()) return nullptr;
    return report->report.verdicts[index].name.c_str();
}

int illpose_report_verdict_passed(const illpose_report* report, size_t index)
{
    if (!report || index >= report->report.verdicts.size()) return 0;
    return report->report.verdicts[index].pass ? 1 : 0;
}

illpose_status illpose_report_metric(const illpose_report* report, const char* key, double* out)
{
    if (!report || !key || !out) return null_arg("report, key or out");
    for (const auto& [k, v] : report->report.metrics)
        if (k == key) {
            *out = v;
            last_error.clear();
            return ILLPOSE_OK;
        }
    last_error = std::string("unknown metric ") + key;
    return ILLPOSE_ERR_NOT_FOUND;
}

size_t illpose_report_row_count(const illpose_report* report) { return report ? report->report.rows.size() : 0; }

illpose_status illpose_report_value(const illpose_report* report, size_t row, const char* column, double* out)
{
    if (!report || !column || !out) return null_arg("report, column or out");
    const auto& cols = report->report.columns;
    const auto it = std::find(cols.begin(), cols.end(), column);
    if (it == cols.end() || row >= report->report.rows.size()) {
        last_error = std::string("no value at column ") + column;
        return ILLPOSE_ERR_NOT_FOUND;
    }
    *out = report->report.rows[row][static_cast<std::size_t>(it - cols.begin())];
    last_error.clear();
    return ILLPOSE_OK;
}

double illpose_report_wall_seconds(const illpose_report* report) { return report ? report->report.wall_seconds : 0.0; }

illpose_status illpose_report_write(const illpose_report* report, const char* dir)
{
    if (!report || !dir) return null_arg("report or dir");
    return guarded([&] { illpose::write_report(report->report, dir); });
}

illpose_status illpose_cauchy_hs_norm(double p, double s, double* out)
{
    if (!out) return null_arg("out");
    return guarded([&] {
        illpose::require(p > 0.0 && s > -0.5, illpose::ErrorCode::invalid_argument, "need p > 0 and s > -1/2");
        *out = illpose::cauchy_hs_norm(p, s);
    });
}

illpose_status illpose_classify_point(double beta, double s, int* feasible, double* theta, double* a, double* b)
{
    if (!feasible) return null_arg("feasible");
    return guarded([&] {
        illpose::require(beta > 0.0, illpose::ErrorCode::invalid_argument, "beta must be positive");
        const auto v = illpose::classify_point(beta, s);
        *feasible = v.feasible ? 1 : 0;
        if (theta) *theta = v.theta;
        if (a) *a = v.a;
        if (b) *b = v.b;
    });
}

double illpose_scaling_critical_index(double beta) { return illpose::scaling_critical_index(beta); }

} // extern "C"
