// pdelab: batch driver for the PDE certification suites.
//
// Subcommands: ns-decay, heat-check, advdiff-run, phase-scan, ineq-suite,
// moser-table.  Exit codes: 0 all certificates pass, 2 certificate failure,
// 3 solver failure, 4 configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>

#include "pdelab/runner.hpp"

using namespace pdelab;

int main(int argc, char** argv) {
    CLI::App app{"pdelab: numerical certification lab for decay estimates and "
                 "sup-norm bounds of conservative PDEs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned long long seed = 1;
    int workers = 1;
    bool svg = false;

    if (const char* env = std::getenv("PDELAB_OUT")) out_dir = env;
    if (out_dir.empty()) out_dir = ".";

    app.add_option("--config", config_path, "scenario configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "RNG seed recorded in all outputs");
    app.add_option("--workers", workers, "worker pool size for scans");
    app.add_flag("--svg", svg, "emit SVG line charts");

    auto* ns = app.add_subcommand("ns-decay", "Navier-Stokes decay run + certificates");
    auto* heat = app.add_subcommand("heat-check", "heat semigroup decay and smoothing checks");
    auto* adv = app.add_subcommand("advdiff-run", "advection-diffusion run + certificates");
    auto* scan = app.add_subcommand("phase-scan", "kappa x amplitude existence scan");
    auto* ineq = app.add_subcommand("ineq-suite", "functional inequality corpus audit");
    auto* moser = app.add_subcommand("moser-table", "iteration constants table");
    for (auto* sub : {ns, heat, adv, scan, ineq, moser}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    RunOptions options;
    options.out_dir = out_dir;
    options.seed = seed;
    options.workers = workers;
    options.svg = svg;

    try {
        ScenarioConfig config = config_path.empty()
                                    ? ScenarioConfig::from_string("", "<defaults>")
                                    : ScenarioConfig::from_file(config_path);
        RunReport report;
        if (ns->parsed()) report = run_ns_decay(config, options);
        else if (heat->parsed()) report = run_heat_check(config, options);
        else if (adv->parsed()) report = run_advdiff_cmd(config, options);
        else if (scan->parsed()) report = run_phase_scan(config, options);
        else if (ineq->parsed()) report = run_ineq_suite(config, options);
        else if (moser->parsed()) report = run_moser_table(config, options);

        for (const auto& c : report.certificates)
            std::fprintf(stdout, "[%s] %s margin=%.6g\n", c.pass ? "PASS" : "FAIL",
                         c.name.c_str(), c.margin);
        for (const auto& [k, v] : report.verdicts)
            std::fprintf(stdout, "%s: %s\n", k.c_str(), v.c_str());
        return report.exit_code;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSolverFailure;
    }
}
