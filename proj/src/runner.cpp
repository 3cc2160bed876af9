#include "pdelab/runner.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "pdelab/advdiff.hpp"
#include "pdelab/constants.hpp"
#include "pdelab/grid.hpp"
#include "pdelab/heat.hpp"
#include "pdelab/ineq.hpp"
#include "pdelab/moser.hpp"
#include "pdelab/navier_stokes.hpp"

namespace pdelab {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

bool RunReport::all_pass() const {
    for (const auto& c : certificates)
        if (!c.pass) return false;
    return true;
}

void RunReport::write_json(const std::string& path) const {
    ordered_json j;
    j["schema"] = "v1";
    j["scenario_id"] = scenario_id;
    j["subcommand"] = subcommand;
    j["seed"] = seed;
    ordered_json v = ordered_json::object();
    for (const auto& [key, value] : verdicts) v[key] = value;
    j["verdicts"] = v;
    ordered_json certs = ordered_json::array();
    for (const auto& c : certificates) {
        ordered_json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["min_margin"] = c.margin;
        e["lhs"] = c.lhs;
        e["rhs"] = c.rhs;
        if (c.indeterminate) e["indeterminate"] = true;
        certs.push_back(e);
    }
    j["certificates"] = certs;
    j["series_files"] = series_files;
    j["solver"] = {{"steps", solver_steps}, {"rejections", solver_rejections}};
    j["exit_code"] = exit_code;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << j.dump(2) << "\n";
}

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<const NormSeries*>& series) {
    const int w = 640, h = 400, pad = 48;
    double tmin = INFINITY, tmax = -INFINITY, vmin = INFINITY, vmax = -INFINITY;
    bool all_positive = true;
    for (const auto* s : series)
        for (const auto& [t, v] : s->samples()) {
            tmin = std::min(tmin, t);
            tmax = std::max(tmax, t);
            if (v <= 0.0) all_positive = false;
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    if (!(tmax > tmin)) { tmax = tmin + 1.0; }
    auto ymap = [&](double v) {
        if (all_positive && vmax / std::max(vmin, 1e-300) > 50.0) {
            const double lo = std::log10(std::max(vmin, 1e-300));
            const double hi = std::log10(vmax);
            return h - pad - (std::log10(std::max(v, 1e-300)) - lo) / (hi - lo) * (h - 2 * pad);
        }
        if (!(vmax > vmin)) return static_cast<double>(h / 2);
        return h - pad - (v - vmin) / (vmax - vmin) * (h - 2 * pad);
    };
    auto xmap = [&](double t) { return pad + (t - tmin) / (tmax - tmin) * (w - 2 * pad); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write svg: " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << w / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
        << "</text>\n";
    out << "<line x1='" << pad << "' y1='" << h - pad << "' x2='" << w - pad << "' y2='"
        << h - pad << "' stroke='black'/>\n";
    out << "<line x1='" << pad << "' y1='" << pad << "' x2='" << pad << "' y2='" << h - pad
        << "' stroke='black'/>\n";
    int ci = 0;
    for (const auto* s : series) {
        out << "<polyline fill='none' stroke='" << colors[ci % 8] << "' stroke-width='1.5' points='";
        for (const auto& [t, v] : s->samples()) out << xmap(t) << "," << ymap(v) << " ";
        out << "'/>\n";
        out << "<text x='" << w - pad + 4 << "' y='" << pad + 16 * ci << "' font-size='10' fill='"
            << colors[ci % 8] << "'>" << s->tag() << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::string basename_of(const std::string& path) {
    return fs::path(path).filename().string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
}

// --- ns-decay ---------------------------------------------------------------

struct NsPreset {
    Field u0;
    int dim;
};

NsPreset build_ns_preset(const ScenarioConfig& cfg, unsigned long long seed) {
    const std::string preset = cfg.get_string("preset");
    if (preset == "taylor-green") {
        const int n_pts = static_cast<int>(cfg.get_int("N", 64));
        GridSpec grid(2, n_pts, cfg.get_double("L", 2.0 * M_PI));
        return {taylor_green_2d(grid, cfg.get_double("amplitude", 1.0)), 2};
    }
    if (preset == "random-2d") {
        const int n_pts = static_cast<int>(cfg.get_int("N", 64));
        GridSpec grid(2, n_pts, cfg.get_double("L", 2.0 * M_PI));
        return {random_divfree_field(grid, static_cast<unsigned>(seed),
                                     cfg.get_double("l2_target", 1.0)),
                2};
    }
    if (preset == "random-3d-small") {
        const int n_pts = static_cast<int>(cfg.get_int("N", 32));
        GridSpec grid(3, n_pts, cfg.get_double("L", 2.0 * M_PI));
        return {random_divfree_field(grid, static_cast<unsigned>(seed),
                                     cfg.get_double("l2_target", 1.0)),
                3};
    }
    throw ConfigError("unknown ns preset: " + preset);
}

} // namespace

RunReport run_ns_decay(const ScenarioConfig& config, const RunOptions& options) {
    RunReport report;
    report.subcommand = "ns-decay";
    report.seed = options.seed;
    report.scenario_id = config.get_string("id", "ns-decay");
    ensure_dir(options.out_dir);

    auto preset = build_ns_preset(config, options.seed);
    const double nu = config.get_double("nu");
    const double dt = config.get_double("dt", 1e-3);
    const double t_final = config.get_double("t_final", 1.0);
    const double t0 = config.get_double("checkpoint_t0", 0.0);
    const int m_max = static_cast<int>(config.get_int("m_max", 4));
    const int stride = static_cast<int>(config.get_int("sample_stride", 20));
    const double energy_tol = config.get_double("energy_tol", 1e-6);
    config.ensure_all_consumed();

    NSState state(preset.u0, nu, m_max);
    const double u0_l2 = state.initial_l2();
    LerayCheckpoint checkpoint{0.0, state.u()};
    bool have_checkpoint = t0 <= 0.0;
    {
        const std::string snap = join_path(options.out_dir, report.scenario_id + "_checkpoint.bin");
        write_field(snap, checkpoint.u_at_t0);
        report.series_files.push_back(basename_of(snap));
    }

    const int monitor_m = std::min(3, m_max);
    std::vector<NormSeries> weighted(monitor_m + 1), err_series(monitor_m + 1);
    for (int m = 0; m <= monitor_m; ++m) {
        weighted[m] = NormSeries("t^{m/2}Dm_L2_m" + std::to_string(m));
        err_series[m] = NormSeries("err_weighted_m" + std::to_string(m));
    }

    long steps = 0, rejections = 0;
    double max_energy_residual = 0.0;
    try {
        while (state.t() < t_final - 0.5 * dt) {
            double step_dt = std::min(dt, t_final - state.t());
            for (int attempt = 0;; ++attempt) {
                try {
                    state.step(step_dt);
                    break;
                } catch (const CflError& e) {
                    if (attempt >= 8) throw;
                    ++rejections;
                    step_dt = e.suggested_dt;
                }
            }
            ++steps;
            if (!have_checkpoint && state.t() >= t0) {
                checkpoint = {state.t(), state.u()};
                have_checkpoint = true;
            }
            max_energy_residual = std::max(
                max_energy_residual,
                std::abs(energy_residual(state, state.history().t.size() - 1)));
            if (steps % stride == 0 && have_checkpoint && state.t() > checkpoint.t0) {
                for (int m = 0; m <= monitor_m; ++m) {
                    auto [wm, we] = decay_monitor_sample(state, checkpoint, m);
                    weighted[m].append(state.t(), wm);
                    err_series[m].append(state.t(), we);
                }
            }
        }
    } catch (const std::exception& e) {
        report.verdicts.emplace_back("solver_error", e.what());
        report.exit_code = kExitSolverFailure;
        report.write_json(join_path(options.out_dir, report.scenario_id + ".json"));
        return report;
    }
    report.solver_steps = steps;
    report.solver_rejections = rejections;

    report.certificates.push_back(energy_certificate(state, energy_tol));
    {
        BoundCertificate c;
        c.name = "energy_residual_all_samples";
        c.lhs = max_energy_residual;
        c.rhs = energy_tol;
        c.margin = c.rhs - c.lhs;
        c.pass = c.lhs < c.rhs;
        report.certificates.push_back(c);
    }

    if (preset.dim == 3) {
        const double bound = tstar_bound(nu, u0_l2);
        report.verdicts.emplace_back("tstar_bound", std::to_string(bound));
        report.certificates.push_back(trilinear_certificate(state.u()));
        auto onset = gradient_monotonicity_onset(state);
        if (onset.has_value()) {
            report.verdicts.emplace_back("gradient_monotonicity_onset", std::to_string(*onset));
            BoundCertificate c;
            c.name = "onset_below_tstar_bound";
            c.lhs = *onset;
            c.rhs = bound;
            c.margin = c.rhs - c.lhs;
            c.pass = *onset <= bound;
            report.certificates.push_back(c);
        } else {
            report.verdicts.emplace_back("gradient_monotonicity_onset", "none");
        }
    } else {
        auto onset = gradient_monotonicity_onset(state);
        report.verdicts.emplace_back("gradient_monotonicity_onset",
                                     onset ? std::to_string(*onset) : "none");
    }

    // histories to CSV
    NormSeries l2("L2"), du("Du_L2");
    const auto& h = state.history();
    for (std::size_t i = 0; i < h.t.size(); i += stride) {
        if (i == 0) continue;
        l2.append(h.t[i], h.l2[i]);
        du.append(h.t[i], h.du_l2[i]);
    }
    std::vector<const NormSeries*> all = {&l2, &du};
    for (int m = 0; m <= monitor_m; ++m) {
        if (!weighted[m].empty()) all.push_back(&weighted[m]);
        if (!err_series[m].empty()) all.push_back(&err_series[m]);
    }
    const std::string csv = join_path(options.out_dir, report.scenario_id + "_series.csv");
    write_series_csv(csv, all);
    report.series_files.push_back(basename_of(csv));
    if (options.svg) {
        const std::string svg = join_path(options.out_dir, report.scenario_id + ".svg");
        write_svg_chart(svg, report.scenario_id, all);
        report.series_files.push_back(basename_of(svg));
    }

    report.exit_code = report.all_pass() ? kExitOk : kExitCertificateFailure;
    report.write_json(join_path(options.out_dir, report.scenario_id + ".json"));
    return report;
}

RunReport run_heat_check(const ScenarioConfig& config, const RunOptions& options) {
    RunReport report;
    report.subcommand = "heat-check";
    report.seed = options.seed;
    report.scenario_id = config.get_string("id", "heat-check");
    ensure_dir(options.out_dir);

    const int dim = static_cast<int>(config.get_int("n", 1));
    const int n_pts = static_cast<int>(config.get_int("N", 256));
    const double nu = config.get_double("nu", 1.0);
    const double sigma = config.get_double("sigma", 1.0);
    const double t0 = config.get_double("t0", 0.5);
    const double t1 = config.get_double("t1", 10.0);
    const double box = config.get_double("L", 40.0 * std::sqrt(nu * t1));
    const std::string datum = config.get_string("datum", "dipole");
    const auto s_list = config.get_list("s", {0.0, 1.0});
    const auto taus = config.get_list("taus", {0.1, 1.0, 10.0});
    const double k_smoothing = config.get_double("k_smoothing", 1.0);
    config.ensure_all_consumed();

    GridSpec grid(dim, n_pts, box);
    Field u0 = Field::from_function(grid, 1, [&](const std::array<double, 3>& x, int) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
        const double gauss = std::exp(-r2 / (2.0 * sigma * sigma));
        return datum == "dipole" ? x[0] / (sigma * sigma) * gauss : gauss;
    });

    const auto times = geometric_times(t0, t1, 10);
    std::vector<NormSeries> decay;
    for (double s : s_list)
        decay.push_back(heat_decay_series(u0, nu, times, {DecayWeight::HdotS, s}));
    decay.push_back(heat_decay_series(u0, nu, times, {DecayWeight::SupNorm, 0.0}));

    // raw L2 norm series for slope reads
    NormSeries l2_raw("L2_raw");
    for (double t : times) l2_raw.append(t, lp_norm(apply_semigroup(u0, nu, t), 2.0));
    const double slope = l2_raw.loglog_slope(0, l2_raw.size() - 1);
    report.verdicts.emplace_back("l2_loglog_slope", std::to_string(slope));
    const double expected =
        datum == "dipole" ? -(0.25 * dim + 0.5) : -0.25 * dim;
    report.verdicts.emplace_back("l2_expected_slope", std::to_string(expected));
    {
        BoundCertificate c;
        c.name = "l2_slope_within_0.1";
        c.lhs = std::abs(slope - expected);
        c.rhs = 0.1;
        c.margin = c.rhs - c.lhs;
        c.pass = c.lhs < c.rhs;
        report.certificates.push_back(c);
    }

    for (double tau : taus)
        report.certificates.push_back(
            smoothing_certificate(u0, nu, tau, {1, 0, 0}, 1.0, k_smoothing));

    std::vector<const NormSeries*> all = {&l2_raw};
    for (auto& s : decay) all.push_back(&s);
    const std::string csv = join_path(options.out_dir, report.scenario_id + "_series.csv");
    write_series_csv(csv, all);
    report.series_files.push_back(basename_of(csv));
    if (options.svg) {
        const std::string svg = join_path(options.out_dir, report.scenario_id + ".svg");
        write_svg_chart(svg, report.scenario_id, all);
        report.series_files.push_back(basename_of(svg));
    }

    report.exit_code = report.all_pass() ? kExitOk : kExitCertificateFailure;
    report.write_json(join_path(options.out_dir, report.scenario_id + ".json"));
    return report;
}

// --- advdiff presets ---------------------------------------------------------

namespace {

struct AdvPreset {
    ProblemSpec spec;
    double mu_floor = 1.0;
};

AdvPreset build_adv_spec(const ScenarioConfig& cfg, double kappa_override = -1.0,
                         double amp_override = -1.0) {
    AdvPreset preset;
    ProblemSpec& spec = preset.spec;
    spec.dim = static_cast<int>(cfg.get_int("n", 1));
    const int n_pts = static_cast<int>(cfg.get_int("N", 256));
    const double box = cfg.get_double("L", 20.0);
    spec.kappa = kappa_override >= 0.0 ? kappa_override : cfg.get_double("kappa", 0.0);
    spec.p0 = cfg.get_double("p0", 1.0);
    spec.sup_cap_factor = cfg.get_double("sup_cap", 1e6);
    spec.dt_floor = cfg.get_double("dt_floor", 1e-10);

    GridSpec grid(spec.dim, n_pts, box);

    // advection field
    const std::string b_preset = cfg.get_string("b_preset", "sin");
    const double b_amp = cfg.get_double("b_amp", 1.0);
    const int dim = spec.dim;
    double b_osc_bound = 0.0;  // analytic bound on B(t)
    if (b_preset == "zero") {
        spec.b = [](const ProblemSpec::Vec3&, double, double, ProblemSpec::Vec3& out) {
            out = {0.0, 0.0, 0.0};
        };
    } else if (b_preset == "constant") {
        spec.b = [b_amp, dim](const ProblemSpec::Vec3&, double, double, ProblemSpec::Vec3& out) {
            out = {0.0, 0.0, 0.0};
            for (int d = 0; d < dim; ++d) out[d] = b_amp;
        };
    } else if (b_preset == "sin") {
        const double k = 2.0 * M_PI / box;
        spec.b = [b_amp, k, dim](const ProblemSpec::Vec3& x, double, double,
                                 ProblemSpec::Vec3& out) {
            out = {0.0, 0.0, 0.0};
            for (int d = 0; d < dim; ++d) out[d] = b_amp * std::sin(k * x[d]);
        };
        b_osc_bound = b_amp * std::sqrt(static_cast<double>(dim));
    } else if (b_preset == "shear") {
        if (dim < 2) throw ConfigError("b_preset shear needs n >= 2");
        const double k = 2.0 * M_PI / box;
        spec.b = [b_amp, k](const ProblemSpec::Vec3& x, double, double, ProblemSpec::Vec3& out) {
            out = {0.0, 0.0, 0.0};
            out[0] = b_amp * std::sin(k * x[1]);
        };
        b_osc_bound = b_amp;
    } else {
        throw ConfigError("unknown b_preset: " + b_preset);
    }

    // x-independent flux
    const std::string f_preset = cfg.get_string("f_preset", "none");
    const double f_amp = cfg.get_double("f_amp", 0.0);
    if (f_preset == "linear") {
        spec.f = [f_amp](double, double u, ProblemSpec::Vec3& out) {
            out = {f_amp * u, 0.0, 0.0};
        };
        spec.f_plus = [f_amp](double, double u, ProblemSpec::Vec3& out) {
            out = {f_amp > 0.0 ? f_amp * u : 0.0, 0.0, 0.0};
        };
        spec.f_minus = [f_amp](double, double u, ProblemSpec::Vec3& out) {
            out = {f_amp < 0.0 ? f_amp * u : 0.0, 0.0, 0.0};
        };
    } else if (f_preset == "burgers") {
        spec.f = [f_amp](double, double u, ProblemSpec::Vec3& out) {
            out = {0.5 * f_amp * u * u, 0.0, 0.0};
        };
        spec.f_plus = [f_amp](double, double u, ProblemSpec::Vec3& out) {
            const double up = f_amp > 0.0 ? std::max(u, 0.0) : std::min(u, 0.0);
            out = {0.5 * f_amp * up * up, 0.0, 0.0};
        };
        spec.f_minus = [f_amp](double, double u, ProblemSpec::Vec3& out) {
            const double um = f_amp > 0.0 ? std::min(u, 0.0) : std::max(u, 0.0);
            out = {0.5 * f_amp * um * um, 0.0, 0.0};
        };
    } else if (f_preset != "none") {
        throw ConfigError("unknown f_preset: " + f_preset);
    }

    // diffusion tensor
    const std::string a_preset = cfg.get_string("a_preset", "const");
    const double a0 = cfg.get_double("a0", 1.0);
    if (a_preset == "const") {
        spec.A = [a0](const ProblemSpec::Vec3&, double, double, ProblemSpec::Mat3& out) {
            out = {};
            for (int d = 0; d < 3; ++d) out[d][d] = a0;
        };
        preset.mu_floor = a0;
    } else if (a_preset == "variable") {
        const double var = cfg.get_double("a_var", 0.5);
        if (!(var >= 0.0 && var < 1.0)) throw ConfigError("a_var must be in [0,1)");
        const double k = 2.0 * M_PI / box;
        spec.A = [a0, var, k](const ProblemSpec::Vec3& x, double, double, ProblemSpec::Mat3& out) {
            out = {};
            const double a = a0 * (1.0 + var * std::sin(k * x[0]));
            for (int d = 0; d < 3; ++d) out[d][d] = a;
        };
        preset.mu_floor = a0 * (1.0 - var);
    } else {
        throw ConfigError("unknown a_preset: " + a_preset);
    }
    const double mu_floor = preset.mu_floor;
    spec.mu = [mu_floor](double) { return mu_floor; };
    if (b_preset != "zero" && b_preset != "constant")
        spec.bmu_infty = b_osc_bound / mu_floor;
    else
        spec.bmu_infty = 0.0;

    // initial datum
    const std::string u0_preset = cfg.get_string("u0_preset", "gaussian");
    const double u0_amp = amp_override >= 0.0 ? amp_override : cfg.get_double("u0_amp", 1.0);
    const double u0_sigma = cfg.get_double("u0_sigma", 1.0);
    spec.u0 = Field::from_function(grid, 1, [&](const std::array<double, 3>& x, int) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
        const double gauss = std::exp(-r2 / (2.0 * u0_sigma * u0_sigma));
        if (u0_preset == "dipole") return u0_amp * x[0] / (u0_sigma * u0_sigma) * gauss;
        if (u0_preset == "two_bumps") {
            double r2b = 0.0;
            for (int d = 0; d < dim; ++d) {
                const double dx = x[d] - (d == 0 ? box / 8.0 : 0.0);
                r2b += dx * dx;
            }
            double r2a = 0.0;
            for (int d = 0; d < dim; ++d) {
                const double dx = x[d] + (d == 0 ? box / 8.0 : 0.0);
                r2a += dx * dx;
            }
            return u0_amp * (std::exp(-r2b / (2.0 * u0_sigma * u0_sigma)) +
                             0.6 * std::exp(-r2a / (2.0 * u0_sigma * u0_sigma)));
        }
        return u0_amp * gauss;  // gaussian
    });
    return preset;
}

} // namespace

RunReport run_advdiff_cmd(const ScenarioConfig& config, const RunOptions& options) {
    RunReport report;
    report.subcommand = "advdiff-run";
    report.seed = options.seed;
    report.scenario_id = config.get_string("id", "advdiff");
    ensure_dir(options.out_dir);

    auto preset = build_adv_spec(config);
    AdvRunConfig run_cfg;
    run_cfg.t_final = config.get_double("t_final", 1.0);
    run_cfg.cfl = config.get_double("cfl", 0.45);
    run_cfg.sample_stride = static_cast<int>(config.get_int("sample_stride", 20));
    run_cfg.tracked_p = config.get_list("tracked_p", {1.0, 2.0});
    run_cfg.linfty_p = config.get_double("linfty_p", 0.0);
    run_cfg.lp_growth_p = config.get_double("lp_growth_p", 0.0);
    run_cfg.audit_q = config.get_list("audit_q", {});
    run_cfg.audit_tol = config.get_double("audit_tol", 1e-3);
    run_cfg.moser_q = config.get_list("moser_q", {});
    config.ensure_all_consumed();

    const auto verdict = global_existence_verdict(preset.spec);
    report.verdicts.emplace_back("thm41_verdict", to_string(verdict));

    auto result = run_advdiff(preset.spec, run_cfg);
    report.solver_steps = result.steps;
    report.verdicts.emplace_back(
        "verdict", result.outcome == RunOutcome::Completed ? "completed" : "blow-up");
    if (result.blow_up_time)
        report.verdicts.emplace_back("blow_up_time", std::to_string(*result.blow_up_time));
    report.verdicts.emplace_back("max_sup_norm", std::to_string(result.max_sup));
    report.certificates = result.certificates;

    // mass law: every conservative run must keep ||u||_1 nonincreasing
    if (!preset.spec.source) {
        const auto& l1 = result.trackers.lp_series.at(1.0);
        double worst = 0.0;
        const double l1_0 = l1.value(0);
        for (std::size_t i = 0; i < l1.size(); ++i)
            worst = std::max(worst, l1.value(i) / l1_0 - 1.0);
        BoundCertificate c;
        c.name = "l1_nonincrease";
        c.lhs = worst;
        c.rhs = 1e-10;
        c.margin = c.rhs - c.lhs;
        c.pass = worst <= 1e-10;
        report.certificates.push_back(c);
    }

    std::vector<const NormSeries*> all = {&result.trackers.sup_series, &result.trackers.b_series,
                                          &result.trackers.bmu_series};
    for (const auto& [p, s] : result.trackers.lp_series) all.push_back(&s);
    const std::string csv = join_path(options.out_dir, report.scenario_id + "_series.csv");
    write_series_csv(csv, all);
    report.series_files.push_back(basename_of(csv));
    if (options.svg) {
        const std::string svg = join_path(options.out_dir, report.scenario_id + ".svg");
        write_svg_chart(svg, report.scenario_id, all);
        report.series_files.push_back(basename_of(svg));
    }

    if (result.outcome == RunOutcome::BlewUp)
        report.exit_code = kExitSolverFailure;
    else
        report.exit_code = report.all_pass() ? kExitOk : kExitCertificateFailure;
    report.write_json(join_path(options.out_dir, report.scenario_id + ".json"));
    return report;
}

RunReport run_phase_scan(const ScenarioConfig& config, const RunOptions& options) {
    RunReport report;
    report.subcommand = "phase-scan";
    report.seed = options.seed;
    report.scenario_id = config.get_string("id", "phase-scan");
    ensure_dir(options.out_dir);

    const auto kappas = config.get_list("kappa_list");
    const auto amps = config.get_list("amp_list");
    const double horizon = config.get_double("horizon", 50.0);
    const std::string mode = config.get_string("mode", "conservative");
    const bool reaction = mode == "reaction";
    if (!reaction && mode != "conservative") throw ConfigError("mode: conservative|reaction");

    struct Cell {
        double kappa, amp;
        std::string thm41;
        RunOutcome outcome;
        std::optional<double> blow_up_time;
        double max_sup;
    };
    std::vector<Cell> cells;
    for (double kappa : kappas)
        for (double amp : amps) cells.push_back({kappa, amp, "n/a", RunOutcome::Completed, {}, 0.0});

    // Pre-build specs serially (ScenarioConfig consumption is not
    // thread-safe), run cells in a small worker pool.
    std::vector<ProblemSpec> specs;
    std::vector<std::string> thm41(cells.size(), "n/a");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (reaction) {
            ScenarioConfig sub = config;  // copy; keys consumed on the copy
            auto preset = build_adv_spec(sub, cells[i].kappa, cells[i].amp);
            preset.spec.source = [kappa = cells[i].kappa](double, double u) {
                return kappa == 0.0 ? u : std::pow(std::abs(u), kappa) * u;
            };
            // reaction mode: b plays no role; zero it for clarity
            preset.spec.b = [](const ProblemSpec::Vec3&, double, double, ProblemSpec::Vec3& out) {
                out = {0.0, 0.0, 0.0};
            };
            preset.spec.bmu_infty.reset();
            specs.push_back(std::move(preset.spec));
        } else {
            ScenarioConfig sub = config;
            auto preset = build_adv_spec(sub, cells[i].kappa, cells[i].amp);
            specs.push_back(std::move(preset.spec));
            thm41[i] = to_string(global_existence_verdict(specs.back()));
        }
    }
    {
        // consume base keys once on the original for the unknown-key check
        ScenarioConfig probe = config;
        build_adv_spec(probe, kappas.front(), amps.front());
        probe.ensure_all_consumed();
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            AdvRunConfig rc;
            rc.t_final = horizon;
            rc.tracked_p = {1.0};
            rc.sample_stride = 200;
            auto res = run_advdiff(specs[i], rc);
            cells[i].thm41 = thm41[i];
            cells[i].outcome = res.outcome;
            cells[i].blow_up_time = res.blow_up_time;
            cells[i].max_sup = res.max_sup;
        }
    };
    std::vector<std::thread> pool;
    const int workers = std::max(1, options.workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // soundness: no theorem-sufficient cell may blow up
    bool sound = true;
    for (const auto& c : cells)
        if (c.thm41.rfind("global", 0) == 0 && c.outcome == RunOutcome::BlewUp) sound = false;

    const std::string csv = join_path(options.out_dir, report.scenario_id + "_cells.csv");
    {
        std::FILE* fp = std::fopen(csv.c_str(), "wb");
        if (!fp) throw std::runtime_error("cannot write " + csv);
        std::fprintf(fp, "kappa,amplitude,verdict,thm41,blow_up_time,max_sup\n");
        for (const auto& c : cells) {
            // cell verdict: blow-up when detected, global when the theorem
            // certifies it, horizon-reached otherwise
            const char* verdict = "horizon-reached";
            if (c.outcome == RunOutcome::BlewUp) verdict = "blow-up";
            else if (c.thm41.rfind("global", 0) == 0) verdict = "global";
            std::fprintf(fp, "%.17g,%.17g,%s,%s,%s,%.17g\n", c.kappa, c.amp, verdict,
                         c.thm41.c_str(),
                         c.blow_up_time ? std::to_string(*c.blow_up_time).c_str() : "",
                         c.max_sup);
        }
        std::fclose(fp);
    }
    report.series_files.push_back(basename_of(csv));

    BoundCertificate c;
    c.name = "phase_scan_soundness";
    c.pass = sound;
    c.lhs = sound ? 0.0 : 1.0;
    c.rhs = 0.5;
    c.margin = c.rhs - c.lhs;
    report.certificates.push_back(c);
    report.verdicts.emplace_back("cells", std::to_string(cells.size()));

    report.exit_code = report.all_pass() ? kExitOk : kExitCertificateFailure;
    report.write_json(join_path(options.out_dir, report.scenario_id + ".json"));
    return report;
}

RunReport run_ineq_suite(const ScenarioConfig& config, const RunOptions& options) {
    RunReport report;
    report.subcommand = "ineq-suite";
    report.seed = options.seed;
    report.scenario_id = config.get_string("id", "ineq-suite");
    ensure_dir(options.out_dir);

    const int count = static_cast<int>(config.get_int("count", 100));
    const double k_nash = config.get_double("k_nash", constants::k_nash_default);
    const double k_l4 = config.get_double("k_l4", 1.0);
    const int n1 = static_cast<int>(config.get_int("N1", 1024));
    const int n2 = static_cast<int>(config.get_int("N2", 128));
    const int n3 = static_cast<int>(config.get_int("N3", 64));
    config.ensure_all_consumed();

    const double box = 20.0;
    const GridSpec grids[3] = {GridSpec(1, n1, box), GridSpec(2, n2, box), GridSpec(3, n3, box)};

    struct Entry {
        InequalitySpec spec;
        int dim;
    };
    std::vector<Entry> entries;
    for (int n = 1; n <= 3; ++n) entries.push_back({make_nash(n, k_nash), n});
    for (int n = 1; n <= 3; ++n)
        entries.push_back({make_gn_l1_family(n, 2.0 + 1.0 / n), n});
    entries.push_back({make_gn_sup_d2(), 3});
    entries.push_back({make_gn_d1(), 3});
    entries.push_back({make_gn_combined(), 3});
    entries.push_back({make_gn_l4(k_l4), 3});
    entries.push_back({make_gn_l3(), 3});

    const std::string csv = join_path(options.out_dir, report.scenario_id + "_ratios.csv");
    std::FILE* fp = std::fopen(csv.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot write " + csv);
    std::fprintf(fp, "inequality,n,sample_id,ratio,pass\n");

    for (const auto& entry : entries) {
        const GridSpec& grid = grids[entry.dim - 1];
        CorpusSpec corpus{grid, 1, static_cast<unsigned>(options.seed)};
        CorpusSummary summary;
        summary.count = count;
        for (int i = 0; i < count; ++i) {
            const Field f = corpus_sample(corpus, i).materialize(grid);
            try {
                const auto cert = audit(entry.spec, f);
                std::fprintf(fp, "%s,%d,%d,%.17g,%d\n", entry.spec.name.c_str(), entry.dim, i,
                             cert.ratio, cert.pass ? 1 : 0);
                if (cert.pass) ++summary.passes;
                summary.max_ratio = std::max(summary.max_ratio, cert.ratio);
            } catch (const RejectedSampleError&) {
                ++summary.rejected;
            }
        }
        BoundCertificate c;
        c.name = entry.spec.name + "_corpus";
        c.lhs = summary.max_ratio;
        c.rhs = entry.spec.constant;
        c.constant = entry.spec.constant;
        c.margin = c.rhs - c.lhs;
        c.ratio = summary.max_ratio;
        c.pass = summary.passes == summary.count - summary.rejected;
        report.certificates.push_back(c);

        // dimensional self-test on a canonical bump; the width keeps the
        // dilated copy resolved on the coarsest grid
        AnalyticSample bump;
        bump.bumps.push_back({1.0, {0.0, 0.0, 0.0}, std::max(box / 25.0, 4.0 * grid.dx())});
        report.certificates.push_back(scaling_audit(entry.spec, grid, bump));
    }
    std::fclose(fp);
    report.series_files.push_back(basename_of(csv));

    // trilinear estimate on vector fields assembled from scalar samples
    {
        const GridSpec& grid = grids[2];
        CorpusSpec corpus{grid, 1, static_cast<unsigned>(options.seed) + 17};
        double max_ratio = 0.0;
        bool all = true;
        const int tri_count = std::max(10, count / 2);
        for (int i = 0; i < tri_count; ++i) {
            Field vec(grid, 3);
            auto& vals = vec.values();
            for (int c3 = 0; c3 < 3; ++c3) {
                const Field comp = corpus_sample(corpus, 3 * i + c3).materialize(grid);
                std::copy(comp.values().begin(), comp.values().end(),
                          vals.begin() + c3 * grid.size());
            }
            const auto cert = trilinear_certificate(vec);
            max_ratio = std::max(max_ratio, cert.ratio);
            all = all && cert.pass;
        }
        BoundCertificate c;
        c.name = "trilinear_a1_corpus";
        c.lhs = max_ratio;
        c.rhs = std::pow(constants::k_gn3, 3);
        c.constant = c.rhs;
        c.margin = c.rhs - c.lhs;
        c.ratio = max_ratio;
        c.pass = all;
        report.certificates.push_back(c);
    }

    // footnote transfer: vector fields inherit the scalar constants
    for (int n = 1; n <= 3; ++n) {
        const GridSpec& grid = grids[n - 1];
        CorpusSpec corpus{grid, 1, static_cast<unsigned>(options.seed) + 31};
        const auto nash = make_nash(n, k_nash);
        bool all = true;
        double max_ratio = 0.0;
        for (int i = 0; i < std::max(5, count / 10); ++i) {
            Field vec(grid, n);
            auto& vals = vec.values();
            for (int c3 = 0; c3 < n; ++c3) {
                const Field comp = corpus_sample(corpus, n * i + c3).materialize(grid);
                std::copy(comp.values().begin(), comp.values().end(),
                          vals.begin() + c3 * grid.size());
            }
            auto [lhs, rhs] = nash.evaluate(vec);
            auto cert = BoundCertificate::make(nash.name + "_vector", lhs, k_nash * rhs, k_nash,
                                               nash.tol);
            all = all && cert.pass;
            max_ratio = std::max(max_ratio, cert.ratio);
        }
        BoundCertificate c;
        c.name = "nash_" + std::to_string(n) + "d_vector_transfer";
        c.lhs = max_ratio;
        c.rhs = k_nash;
        c.constant = k_nash;
        c.margin = c.rhs - c.lhs;
        c.ratio = max_ratio;
        c.pass = all;
        report.certificates.push_back(c);
    }

    report.exit_code = report.all_pass() ? kExitOk : kExitCertificateFailure;
    report.write_json(join_path(options.out_dir, report.scenario_id + ".json"));
    return report;
}

RunReport run_moser_table(const ScenarioConfig& config, const RunOptions& options) {
    RunReport report;
    report.subcommand = "moser-table";
    report.seed = options.seed;
    report.scenario_id = config.get_string("id", "moser-table");
    ensure_dir(options.out_dir);

    const int n = static_cast<int>(config.get_int("n", 1));
    const double kappa = config.get_double("kappa", 0.0);
    const double p = config.get_double("p", 1.0);
    const int m_max = static_cast<int>(config.get_int("m_max", 10));
    const double k_nash = config.get_double("k_nash", constants::k_nash_default);
    const double bmu = config.get_double("bmu", 1.0);
    const double up = config.get_double("up", 1.0);
    const double u0_amp = config.get_double("u0_amp", 1.0);
    const double u0_width = config.get_double("u0_width", 1.0);
    config.ensure_all_consumed();

    IterationParams params(n, kappa, p, k_nash);
    std::vector<double> norms;
    for (int l = 0; l <= m_max; ++l)
        norms.push_back(gaussian_lp_norm(n, u0_amp, u0_width, std::ldexp(p, l)));
    auto ledger = build_ledger(params, norms, bmu, up, m_max);

    const std::string csv = join_path(options.out_dir, report.scenario_id + ".csv");
    std::FILE* fp = std::fopen(csv.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot write " + csv);
    std::fprintf(fp, "level,q,lambda,C_1m,bound\n");
    for (const auto& row : ledger.rows)
        std::fprintf(fp, "%d,%.17g,%.17g,%.17g,%.17g\n", row.level, row.q, row.lambda, row.c_1m,
                     row.bound);
    std::fclose(fp);
    report.series_files.push_back(basename_of(csv));

    const double cap = iteration_constant(params);
    bool ok = true;
    for (const auto& row : ledger.rows) ok = ok && row.c_1m <= cap;
    BoundCertificate c;
    c.name = "c_jm_uniform_bound";
    c.lhs = ledger.rows.empty() ? 0.0 : ledger.rows.back().c_1m;
    c.rhs = cap;
    c.margin = c.rhs - c.lhs;
    c.pass = ok;
    report.certificates.push_back(c);
    report.verdicts.emplace_back("iteration_constant", std::to_string(cap));

    report.exit_code = report.all_pass() ? kExitOk : kExitCertificateFailure;
    report.write_json(join_path(options.out_dir, report.scenario_id + ".json"));
    return report;
}

} // namespace pdelab
