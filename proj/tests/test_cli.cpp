#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pdelab/runner.hpp"

using namespace pdelab;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("scenario config parsing") {
    SUBCASE("key-value with comments and types") {
        auto cfg = ScenarioConfig::from_string(
            "# a comment\n"
            "alpha = 1.5\n"
            "name = hello # trailing\n"
            "count = 3\n"
            "list = 1, 2.5, 3\n");
        CHECK(cfg.get_double("alpha") == 1.5);
        CHECK(cfg.get_string("name") == "hello");
        CHECK(cfg.get_int("count") == 3);
        CHECK(cfg.get_list("list") == std::vector<double>{1.0, 2.5, 3.0});
        cfg.ensure_all_consumed();
    }

    SUBCASE("unknown keys are fail-fast errors") {
        auto cfg = ScenarioConfig::from_string("known = 1\nmystery = 2\n");
        CHECK(cfg.get_double("known") == 1.0);
        CHECK_THROWS_AS(cfg.ensure_all_consumed(), ConfigError);
    }

    SUBCASE("parse diagnostics carry the line number") {
        try {
            ScenarioConfig::from_string("a = 1\nnot a pair\n", "test.cfg");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("test.cfg:2") != std::string::npos);
        }
    }

    SUBCASE("duplicate keys rejected") {
        CHECK_THROWS_AS(ScenarioConfig::from_string("a = 1\na = 2\n"), ConfigError);
    }

    SUBCASE("non-numeric values rejected") {
        auto cfg = ScenarioConfig::from_string("x = banana\n");
        CHECK_THROWS_AS(cfg.get_double("x"), ConfigError);
    }
}

TEST_CASE("moser-table subcommand emits the ledger") {
    auto cfg = ScenarioConfig::from_string(
        "n = 1\nkappa = 0\np = 1\nm_max = 10\nid = tbl\n");
    RunOptions opt;
    opt.out_dir = "cli_out";
    auto report = run_moser_table(cfg, opt);
    CHECK(report.exit_code == kExitOk);
    const std::string csv = slurp("cli_out/tbl.csv");
    CHECK(csv.rfind("level,q,lambda,C_1m,bound", 0) == 0);
    // C(1,m) stays below 2^{1/1} = 2 for p = 1, n = 1, kappa = 0
    CHECK(report.certificates.front().pass);
    CHECK(report.certificates.front().rhs == doctest::Approx(2.0));
}

TEST_CASE("deterministic reports and series") {
    auto make = [](const std::string& dir) {
        auto cfg = ScenarioConfig::from_string(
            "preset = taylor-green\nN = 32\nnu = 0.5\ndt = 2e-3\nt_final = 0.1\nid = det\n");
        RunOptions opt;
        opt.out_dir = dir;
        opt.seed = 99;
        return run_ns_decay(cfg, opt);
    };
    auto r1 = make("cli_det_a");
    auto r2 = make("cli_det_b");
    CHECK(r1.exit_code == kExitOk);
    CHECK(slurp("cli_det_a/det.json") == slurp("cli_det_b/det.json"));
    CHECK(slurp("cli_det_a/det_series.csv") == slurp("cli_det_b/det_series.csv"));
}

TEST_CASE("report schema") {
    auto cfg = ScenarioConfig::from_string(
        "n = 1\nN = 128\nkappa = 0\nt_final = 0.05\nid = rep\nlinfty_p = 1\n");
    RunOptions opt;
    opt.out_dir = "cli_out";
    auto report = run_advdiff_cmd(cfg, opt);
    const std::string json = slurp("cli_out/rep.json");
    CHECK(json.find("\"schema\": \"v1\"") != std::string::npos);
    CHECK(json.find("\"max_sup_norm\"") != std::string::npos);
    CHECK(json.find("\"min_margin\"") != std::string::npos);
    // every configured certificate appears exactly once
    CHECK(json.find("linfty_bound") != std::string::npos);
}

TEST_CASE("heat-check subcommand fits the dipole decay slope") {
    auto cfg = ScenarioConfig::from_string(
        "n = 1\nN = 512\nnu = 1\nsigma = 1\nt0 = 6.3\nt1 = 12.6\ndatum = dipole\nid = hc\n");
    RunOptions opt;
    opt.out_dir = "cli_out";
    auto report = run_heat_check(cfg, opt);
    CHECK(report.exit_code == kExitOk);
    bool found = false;
    for (const auto& [k, v] : report.verdicts)
        if (k == "l2_loglog_slope") found = true;
    CHECK(found);
}

TEST_CASE("phase scan completes with isolated cells") {
    auto cfg = ScenarioConfig::from_string(
        "n = 1\nN = 64\nL = 20\nkappa_list = 0.5\namp_list = 0.1, 0.5\n"
        "horizon = 0.5\nid = scan\n");
    RunOptions opt;
    opt.out_dir = "cli_out";
    opt.workers = 2;
    auto report = run_phase_scan(cfg, opt);
    CHECK(report.exit_code == kExitOk);
    const std::string csv = slurp("cli_out/scan_cells.csv");
    CHECK(csv.find("global-by-(i)") != std::string::npos);
}

TEST_CASE("certificate failure maps to exit code 2") {
    // an over-tight audit tolerance forces a failing certificate
    auto cfg = ScenarioConfig::from_string(
        "n = 1\nN = 128\nkappa = 0\nt_final = 0.2\nid = tight\naudit_q = 2\n"
        "audit_tol = 1e-12\n");
    RunOptions opt;
    opt.out_dir = "cli_out";
    auto report = run_advdiff_cmd(cfg, opt);
    CHECK(report.exit_code == kExitCertificateFailure);
}

TEST_CASE("ns-decay writes the checkpoint snapshot in the field format") {
    auto cfg = ScenarioConfig::from_string(
        "preset = taylor-green\nN = 16\nnu = 0.5\ndt = 5e-3\nt_final = 0.05\nid = snap\n");
    RunOptions opt;
    opt.out_dir = "cli_out";
    auto report = run_ns_decay(cfg, opt);
    CHECK(report.exit_code == kExitOk);
    std::ifstream snap("cli_out/snap_checkpoint.bin", std::ios::binary);
    CHECK(snap.good());
    char magic[8];
    snap.read(magic, 8);
    CHECK(std::string(magic, 8) == "PDLBFLD1");
}

TEST_CASE("svg emission") {
    NormSeries s("demo");
    s.append(1.0, 1.0);
    s.append(2.0, 0.5);
    s.append(3.0, 0.25);
    write_svg_chart("cli_out/demo.svg", "demo", {&s});
    const std::string svg = slurp("cli_out/demo.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}
