#pragma once

#include <string>
#include <vector>

#include "pdelab/certificate.hpp"
#include "pdelab/scenario.hpp"
#include "pdelab/series.hpp"

namespace pdelab {

// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitCertificateFailure = 2,
    kExitSolverFailure = 3,
    kExitConfigError = 4,
};

struct RunOptions {
    std::string out_dir = ".";
    unsigned long long seed = 1;
    int workers = 1;
    bool svg = false;
};

struct RunReport {
    std::string scenario_id;
    std::string subcommand;
    unsigned long long seed = 1;
    std::vector<std::pair<std::string, std::string>> verdicts;  // name -> value
    std::vector<BoundCertificate> certificates;
    std::vector<std::string> series_files;
    long solver_steps = 0;
    long solver_rejections = 0;
    int exit_code = kExitOk;

    bool all_pass() const;
    void write_json(const std::string& path) const;
};

// Minimal line chart, one polyline per series, log10 y-axis when positive.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<const NormSeries*>& series);

// Subcommand drivers.  Each consumes its config keys (unknown keys raise
// ConfigError) and writes CSV/JSON artifacts under options.out_dir.
RunReport run_ns_decay(const ScenarioConfig& config, const RunOptions& options);
RunReport run_heat_check(const ScenarioConfig& config, const RunOptions& options);
RunReport run_advdiff_cmd(const ScenarioConfig& config, const RunOptions& options);
RunReport run_phase_scan(const ScenarioConfig& config, const RunOptions& options);
RunReport run_ineq_suite(const ScenarioConfig& config, const RunOptions& options);
RunReport run_moser_table(const ScenarioConfig& config, const RunOptions& options);

} // namespace pdelab
