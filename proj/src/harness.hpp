#pragma once

#include "config.hpp"
#include "report.hpp"

#include <string>
#include <vector>

namespace illpose {

ExperimentReport uc_szego_experiment(const ExperimentConfig& cfg);
ExperimentReport uc_nhw_experiment(const ExperimentConfig& cfg);
ExperimentReport uc_l2_experiment(const ExperimentConfig& cfg);
ExperimentReport c3_experiment(const ExperimentConfig& cfg);
ExperimentReport approx_experiment(const ExperimentConfig& cfg);
ExperimentReport inflate_experiment(const ExperimentConfig& cfg);
ExperimentReport picard_audit_experiment(const ExperimentConfig& cfg);
ExperimentReport region_map_experiment(const ExperimentConfig& cfg);

// Names accepted by run(); "uc-l2-focusing" is an alias of "uc-l2".
const std::vector<std::string>& experiment_names();
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Feasible (beta, s) cells of a region-map report as filled squares, with the
// theorem's boundary curves overlaid.
std::string region_map_svg(const ExperimentReport& r);

struct RunOutcome {
    // 0 all verdicts pass, 1 a verdict failed or an experiment aborted, 2 bad configuration
    int exit_code = 0;
    std::vector<ExperimentReport> reports;
    std::string message;
    std::string output_dir;
};

// Runs the configured experiment, or every experiment for "suite", and writes
// CSV, summary and SVG files. ILLPOSE_OUT overrides the output directory.
RunOutcome run(const ExperimentConfig& cfg);

} // namespace illpose
