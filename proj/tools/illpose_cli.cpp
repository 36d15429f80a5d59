#include "illpose/illpose.h"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Options {
    std::string config_file;
    std::vector<std::string> assignments;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> beta, s;
    std::optional<long> sweep_n;
    std::string beta_range, s_range, eps;
    std::string suite;
};

void add_common(CLI::App* sub, Options& o)
{
    sub->add_option("-c,--config", o.config_file, "INI file with experiment settings");
    sub->add_option("--set", o.assignments, "override a setting, key=value (repeatable)");
    sub->add_option("-o,--out", o.out_dir, "output directory (ILLPOSE_OUT takes precedence)");
    sub->add_option("--seed", o.seed, "seed for Monte-Carlo checks");
    sub->add_option("--beta", o.beta, "dispersion exponent");
    sub->add_option("--s", o.s, "Sobolev index");
    sub->add_option("--sweep-N", o.sweep_n, "number of carrier frequencies, one octave apart");
    sub->add_option("--beta-range", o.beta_range, "lo:hi:step");
    sub->add_option("--s-range", o.s_range, "lo:hi:step");
    sub->add_option("--eps", o.eps, "comma-separated epsilon list");
}

int check(illpose_status st)
{
    if (st == ILLPOSE_OK) return 0;
    std::cerr << "illpose: " << illpose_status_name(st) << ": " << illpose_last_error() << '\n';
    return st == ILLPOSE_ERR_CONFIG || st == ILLPOSE_ERR_INVALID_ARGUMENT || st == ILLPOSE_ERR_IO ? 2 : 1;
}

int execute(const std::string& experiment, const Options& o)
{
    illpose_config* cfg = nullptr;
    if (int rc = check(illpose_config_new(nullptr, &cfg))) return rc;
    int rc = 0;
    auto set = [&](const char* key, const std::string& value) {
        if (!rc) rc = check(illpose_config_set(cfg, key, value.c_str()));
    };
    if (!o.config_file.empty()) rc = check(illpose_config_load(cfg, o.config_file.c_str()));
    if (!rc) rc = check(illpose_config_set_experiment(cfg, experiment.c_str()));
    if (!rc && !o.out_dir.empty()) rc = check(illpose_config_set_output_dir(cfg, o.out_dir.c_str()));
    if (!rc && o.seed) rc = check(illpose_config_set_seed(cfg, *o.seed));
    char buf[64];
    if (o.beta) {
        std::snprintf(buf, sizeof buf, "%.17g", *o.beta);
        set("beta", buf);
    }
    if (o.s) {
        std::snprintf(buf, sizeof buf, "%.17g", *o.s);
        set("s", buf);
    }
    if (o.sweep_n) set("sweep_n", std::to_string(*o.sweep_n));
    if (!o.beta_range.empty()) set("beta_range", o.beta_range);
    if (!o.s_range.empty()) set("s_range", o.s_range);
    if (!o.eps.empty()) set("eps", o.eps);
    for (const auto& a : o.assignments)
        if (!rc) rc = check(illpose_config_set_assignment(cfg, a.c_str()));
    if (!rc) {
        int exit_code = 0;
        const char* message = nullptr;
        rc = check(illpose_run(cfg, &exit_code, &message));
        if (!rc) {
            if (message) std::cout << message;
            rc = exit_code;
        }
    }
    illpose_config_free(cfg);
    return rc;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical experiments on norm inflation and ill-posedness for half-wave and fractional NLS"};
    app.require_subcommand(0, 1);
    Options opts;
    std::map<std::string, CLI::App*> subs;
    for (std::size_t i = 0; i < illpose_experiment_count(); ++i) {
        const std::string name = illpose_experiment_name(i);
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        add_common(sub, opts);
        subs[name] = sub;
    }
    auto* focusing = app.add_subcommand("uc-l2-focusing", "alias of uc-l2");
    add_common(focusing, opts);
    subs["uc-l2-focusing"] = focusing;
    auto* suite = app.add_subcommand("suite", "run every experiment");
    add_common(suite, opts);
    subs["suite"] = suite;
    auto* runner = app.add_subcommand("run", "run a named suite (only \"default\")");
    add_common(runner, opts);
    runner->add_option("--suite", opts.suite, "suite name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (argc < 2 || app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }
    auto* chosen = app.get_subcommands().front();
    if (chosen == runner) {
        if (opts.suite != "default") {
            std::cerr << "illpose: unknown suite " << opts.suite << '\n';
            return 2;
        }
        return execute("suite", opts);
    }
    return execute(chosen->get_name(), opts);
}
