#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "illpose/illpose.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

namespace fs = std::filesystem;

static fs::path scratch_dir(const char* name)
{
    auto p = fs::temp_directory_path() / (std::string("illpose_capi_") + name);
    fs::remove_all(p);
    return p;
}

TEST_CASE("config handles and errors")
{
    illpose_config* cfg = nullptr;
    REQUIRE(illpose_config_new("uc-szego", &cfg) == ILLPOSE_OK);
    CHECK(std::string(illpose_config_experiment(cfg)) == "uc-szego");
    CHECK(illpose_config_set_assignment(cfg, "no-equals-sign") == ILLPOSE_ERR_CONFIG);
    CHECK(std::string(illpose_last_error()).find("key=value") != std::string::npos);
    CHECK(illpose_config_set(cfg, "s", "0.2") == ILLPOSE_OK);
    CHECK(std::string(illpose_last_error()).empty());
    CHECK(illpose_config_set(nullptr, "s", "0.2") == ILLPOSE_ERR_INVALID_ARGUMENT);
    CHECK(illpose_config_load(cfg, "/nonexistent/settings.ini") == ILLPOSE_ERR_CONFIG);
    illpose_config_free(cfg);
    illpose_config_free(nullptr);
    CHECK(illpose_config_new(nullptr, nullptr) == ILLPOSE_ERR_INVALID_ARGUMENT);
}

TEST_CASE("experiment names")
{
    const size_t n = illpose_experiment_count();
    CHECK(n == 8);
    bool found = false;
    for (size_t i = 0; i < n; ++i) found = found || std::string(illpose_experiment_name(i)) == "inflate";
    CHECK(found);
    CHECK(illpose_experiment_name(n) == nullptr);
}

TEST_CASE("in-memory run of a closed-form experiment")
{
    illpose_config* cfg = nullptr;
    REQUIRE(illpose_config_new("uc-szego", &cfg) == ILLPOSE_OK);
    illpose_report* rep = nullptr;
    REQUIRE(illpose_run_experiment(cfg, &rep) == ILLPOSE_OK);
    CHECK(illpose_report_passed(rep) == 1);
    CHECK(std::string(illpose_report_experiment(rep)) == "uc-szego");
    CHECK(std::string(illpose_report_csv(rep)).find("eps,lambda") != std::string::npos);
    CHECK(std::string(illpose_report_summary(rep)).find("overall PASS") != std::string::npos);
    REQUIRE(illpose_report_verdict_count(rep) >= 5);
    CHECK(illpose_report_verdict_name(rep, 0) != nullptr);
    CHECK(illpose_report_verdict_passed(rep, 0) == 1);
    CHECK(illpose_report_verdict_name(rep, 1000) == nullptr);
    double v = 0.0;
    CHECK(illpose_report_metric(rep, "dist0_last", &v) == ILLPOSE_OK);
    CHECK(v > 0.0);
    CHECK(illpose_report_metric(rep, "missing", &v) == ILLPOSE_ERR_NOT_FOUND);
    CHECK(illpose_report_row_count(rep) == 3);
    CHECK(illpose_report_value(rep, 0, "eps", &v) == ILLPOSE_OK);
    CHECK(v == 0.01);
    CHECK(illpose_report_value(rep, 5, "eps", &v) == ILLPOSE_ERR_NOT_FOUND);
    const auto dir = scratch_dir("write");
    CHECK(illpose_report_write(rep, dir.c_str()) == ILLPOSE_OK);
    CHECK(fs::exists(dir / "uc-szego.csv"));
    illpose_report_free(rep);
    illpose_config_free(cfg);
}

TEST_CASE("configuration errors surface as config status")
{
    illpose_config* cfg = nullptr;
    REQUIRE(illpose_config_new("no-such-experiment", &cfg) == ILLPOSE_OK);
    illpose_report* rep = nullptr;
    CHECK(illpose_run_experiment(cfg, &rep) == ILLPOSE_ERR_CONFIG);
    CHECK(rep == nullptr);
    int code = -1;
    const char* msg = nullptr;
    CHECK(illpose_run(cfg, &code, &msg) == ILLPOSE_OK);
    CHECK(code == 2);
    illpose_config_set_experiment(cfg, "uc-szego");
    illpose_config_set(cfg, "s", "0.7");
    CHECK(illpose_run_experiment(cfg, &rep) == ILLPOSE_ERR_CONFIG);
    CHECK(illpose_run(cfg, &code, &msg) == ILLPOSE_OK);
    CHECK(code == 2);
    illpose_config_free(cfg);
}

TEST_CASE("run writes artifacts and honors the output override")
{
    const auto dir = scratch_dir("run");
    const auto env_dir = scratch_dir("env");
    illpose_config* cfg = nullptr;
    REQUIRE(illpose_config_new("region-map", &cfg) == ILLPOSE_OK);
    illpose_config_set_output_dir(cfg, dir.c_str());
    illpose_config_set(cfg, "beta_range", "0.5:2.5:0.5");
    illpose_config_set(cfg, "s_range", "-1:0:0.25");
    illpose_config_set(cfg, "mc_samples", "2000");
    int code = -1;
    const char* msg = nullptr;
    REQUIRE(illpose_run(cfg, &code, &msg) == ILLPOSE_OK);
    CHECK(code == 0);
    CHECK(std::string(msg).find("region-map: pass") != std::string::npos);
    CHECK(fs::exists(dir / "region-map.csv"));
    CHECK(fs::exists(dir / "region-map.svg"));
    CHECK(fs::exists(dir / "region-map_summary.txt"));

    setenv("ILLPOSE_OUT", env_dir.c_str(), 1);
    REQUIRE(illpose_run(cfg, &code, &msg) == ILLPOSE_OK);
    unsetenv("ILLPOSE_OUT");
    CHECK(fs::exists(env_dir / "region-map.csv"));
    std::ifstream a(dir / "region-map.csv"), b(env_dir / "region-map.csv");
    const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
    illpose_config_free(cfg);
}

TEST_CASE("direct numerical entry points")
{
    double v = 0.0;
    REQUIRE(illpose_cauchy_hs_norm(1.0, 0.0, &v) == ILLPOSE_OK);
    CHECK(std::abs(v - std::sqrt(std::numbers::pi)) < 1e-12);
    CHECK(illpose_cauchy_hs_norm(-1.0, 0.0, &v) == ILLPOSE_ERR_INVALID_ARGUMENT);
    int feasible = -1;
    double theta = 0, a = 0, b = 0;
    REQUIRE(illpose_classify_point(1.0, -0.5, &feasible, &theta, &a, &b) == ILLPOSE_OK);
    CHECK(feasible == 1);
    CHECK(theta > 0.0);
    REQUIRE(illpose_classify_point(1.5, -0.25, &feasible, nullptr, nullptr, nullptr) == ILLPOSE_OK);
    CHECK(feasible == 0);
    CHECK(illpose_scaling_critical_index(2.0) == -0.5);
    CHECK(std::string(illpose_status_name(ILLPOSE_ERR_CONFIG)) == "configuration");
}
