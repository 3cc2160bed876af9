#include <doctest.h>

#include <cmath>

#include "pdelab/advdiff.hpp"
#include "pdelab/heat.hpp"
#include "pdelab/navier_stokes.hpp"

using namespace pdelab;

namespace {

ProblemSpec heat_problem(int dim, int cells, double box, double sigma = 2.0, double amp = 1.0) {
    ProblemSpec spec;
    spec.dim = dim;
    spec.kappa = 0.0;
    spec.b = [](const ProblemSpec::Vec3&, double, double, ProblemSpec::Vec3& out) {
        out = {0.0, 0.0, 0.0};
    };
    spec.A = [](const ProblemSpec::Vec3&, double, double, ProblemSpec::Mat3& out) {
        out = {};
        for (int d = 0; d < 3; ++d) out[d][d] = 1.0;
    };
    spec.mu = [](double) { return 1.0; };
    GridSpec grid(dim, cells, box);
    spec.u0 = Field::from_function(grid, 1, [=](const std::array<double, 3>& x, int) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
        return amp * std::exp(-r2 / (2.0 * sigma * sigma));
    });
    return spec;
}

// heterogeneous scenario: oscillating advection + variable diffusion
ProblemSpec hetero_problem(int dim, int cells, double box, double kappa, double amp,
                           double b_amp = 1.0) {
    ProblemSpec spec = heat_problem(dim, cells, box, 1.0, amp);
    spec.kappa = kappa;
    const double k = 2.0 * M_PI / box;
    spec.b = [k, dim, b_amp](const ProblemSpec::Vec3& x, double, double, ProblemSpec::Vec3& out) {
        out = {0.0, 0.0, 0.0};
        for (int d = 0; d < dim; ++d) out[d] = b_amp * std::sin(k * x[d]);
    };
    spec.A = [k](const ProblemSpec::Vec3& x, double, double, ProblemSpec::Mat3& out) {
        out = {};
        const double a = 1.0 + 0.4 * std::sin(k * x[0]);
        for (int d = 0; d < 3; ++d) out[d][d] = a;
    };
    spec.mu = [](double) { return 0.6; };
    spec.bmu_infty = b_amp * std::sqrt(static_cast<double>(dim)) / 0.6;
    return spec;
}

} // namespace

TEST_CASE("oscillation of b") {
    GridSpec g(1, 256, 10.0);
    Field u = Field::from_function(g, 1, [](const std::array<double, 3>& x, int) {
        return std::exp(-x[0] * x[0]);
    });

    SUBCASE("x-independent b has zero oscillation") {
        ProblemSpec spec;
        spec.dim = 1;
        spec.b = [](const ProblemSpec::Vec3&, double t, double u_, ProblemSpec::Vec3& out) {
            out = {3.0 + t + 0.0 * u_, 0.0, 0.0};
        };
        auto [vec, b] = oscillation_b(spec, u, 0.7);
        CHECK(b == 0.0);
        CHECK(vec[0] == 0.0);
    }

    SUBCASE("resolved sine has unit half-oscillation") {
        ProblemSpec spec;
        spec.dim = 1;
        const double k = 2.0 * M_PI / g.length();
        spec.b = [k](const ProblemSpec::Vec3& x, double, double, ProblemSpec::Vec3& out) {
            out = {std::sin(k * x[0]), 0.0, 0.0};
        };
        auto [vec, b] = oscillation_b(spec, u, 0.0);
        CHECK(b == doctest::Approx(1.0).epsilon(1e-3));
    }

    SUBCASE("componentwise halves combine euclideanly") {
        GridSpec g2(2, 64, 10.0);
        Field u2 = Field::from_function(g2, 1, [](const std::array<double, 3>&, int) { return 1.0; });
        ProblemSpec spec;
        spec.dim = 2;
        const double k = 2.0 * M_PI / g2.length();
        spec.b = [k](const ProblemSpec::Vec3& x, double, double, ProblemSpec::Vec3& out) {
            // each component ranges over [0, 2]
            out = {1.0 + std::sin(k * x[0]), 1.0 + std::cos(k * x[1]), 0.0};
        };
        auto [vec, b] = oscillation_b(spec, u2, 0.0);
        CHECK(vec[0] == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(vec[1] == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(b == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
    }

    SUBCASE("NaN coefficients rejected") {
        ProblemSpec spec;
        spec.dim = 1;
        spec.b = [](const ProblemSpec::Vec3&, double, double, ProblemSpec::Vec3& out) {
            out = {std::nan(""), 0.0, 0.0};
        };
        CHECK_THROWS_AS(oscillation_b(spec, u, 0.0), std::invalid_argument);
    }
}

TEST_CASE("fv stepping") {
    SUBCASE("pure heat matches the spectral propagator") {
        const int dim = 1;
        ProblemSpec spec = heat_problem(dim, 256, 30.0);
        AdvState state(spec, {1.0, 2.0});
        const double t_end = 0.5;
        while (state.t() < t_end - 1e-12)
            state.step(std::min(state.stable_dt(0.45), t_end - state.t()));
        const Field oracle = apply_semigroup(spec.u0, 1.0, state.t());
        double worst = 0.0;
        for (std::size_t i = 0; i < state.u().size(); ++i)
            worst = std::max(worst, std::abs(state.u().values()[i] - oracle.values()[i]));
        CHECK(worst < 1e-4);
    }

    SUBCASE("discrete mass is exact to round-off each step") {
        ProblemSpec spec = hetero_problem(1, 256, 20.0, 0.3, 1.0);
        AdvState state(spec, {1.0});
        const double vol = spec.u0.grid().cell_volume();
        double mass0 = 0.0;
        for (double v : spec.u0.values()) mass0 += v;
        mass0 *= vol;
        for (int i = 0; i < 200; ++i) {
            state.step(state.stable_dt(0.45));
            double mass = 0.0;
            for (double v : state.u().values()) mass += v;
            mass *= vol;
            CHECK(std::abs(mass - mass0) <= 1e-13 * std::abs(mass0));
        }
    }

    SUBCASE("positivity for nonnegative data") {
        ProblemSpec spec = hetero_problem(1, 256, 20.0, 0.5, 2.0);
        AdvState state(spec, {1.0});
        for (int i = 0; i < 300; ++i) {
            state.step(state.stable_dt(0.45));
            double lo = 0.0;
            for (double v : state.u().values()) lo = std::min(lo, v);
            CHECK(lo >= -1e-12 * state.initial_sup());
        }
    }

    SUBCASE("L1 never increases (signed data included)") {
        ProblemSpec spec = hetero_problem(1, 256, 20.0, 0.0, 1.0);
        // make the datum signed: a dipole profile
        GridSpec grid(1, 256, 20.0);
        spec.u0 = Field::from_function(grid, 1, [](const std::array<double, 3>& x, int) {
            return x[0] * std::exp(-x[0] * x[0]);
        });
        AdvState state(spec, {1.0});
        double prev = lp_norm(state.u(), 1.0);
        for (int i = 0; i < 300; ++i) {
            state.step(state.stable_dt(0.45));
            const double now = lp_norm(state.u(), 1.0);
            CHECK(now <= prev * (1.0 + 1e-10));
            prev = now;
        }
    }

    SUBCASE("tracker monotonicity holds exactly") {
        ProblemSpec spec = hetero_problem(2, 32, 20.0, 0.3, 1.5);
        AdvRunConfig cfg;
        cfg.t_final = 0.2;
        cfg.sample_stride = 5;
        cfg.tracked_p = {1.0, 2.0};
        auto result = run_advdiff(spec, cfg);
        const auto& bmu = result.trackers.bmu_series;
        for (std::size_t i = 0; i + 1 < bmu.size(); ++i)
            CHECK(bmu.value(i + 1) >= bmu.value(i));
        const auto& up = result.trackers.up_run_series.at(2.0);
        for (std::size_t i = 0; i + 1 < up.size(); ++i)
            CHECK(up.value(i + 1) >= up.value(i));
    }

    SUBCASE("blow-up detection terminates the run") {
        ProblemSpec spec = heat_problem(1, 128, 20.0, 1.0, 1.0);
        spec.kappa = 1.0;
        spec.source = [](double, double u) { return std::abs(u) * u; };
        spec.sup_cap_factor = 50.0;  // low cap to trip early
        AdvRunConfig cfg;
        cfg.t_final = 100.0;
        auto result = run_advdiff(spec, cfg);
        CHECK(result.outcome == RunOutcome::BlewUp);
        CHECK(result.blow_up_time.has_value());
    }
}

TEST_CASE("lp growth certificate") {
    SUBCASE("x-independent b means no growth at all") {
        ProblemSpec spec = heat_problem(1, 256, 20.0);
        AdvRunConfig cfg;
        cfg.t_final = 0.3;
        cfg.lp_growth_p = 2.0;
        auto result = run_advdiff(spec, cfg);
        REQUIRE(!result.certificates.empty());
        const auto& cert = result.certificates.front();
        CHECK(cert.pass);
        // B = 0: the bound collapses to nonincrease of ||u||_2
        CHECK(cert.rhs == doctest::Approx(lp_norm(spec.u0, 2.0)).epsilon(1e-12));
    }

    SUBCASE("heterogeneous kappa = 0 scenario passes with margin") {
        ProblemSpec spec = hetero_problem(1, 256, 20.0, 0.0, 1.0);
        AdvRunConfig cfg;
        cfg.t_final = 0.5;
        cfg.lp_growth_p = 2.0;
        auto result = run_advdiff(spec, cfg);
        CHECK(result.certificates.front().pass);
    }

    SUBCASE("p below p0 rejected") {
        ProblemSpec spec = heat_problem(1, 128, 20.0);
        spec.p0 = 2.0;
        AdvState state(spec, {2.0});
        CHECK_THROWS_AS(lp_growth_certificate(state, 1.0), std::domain_error);
    }
}

TEST_CASE("energy identity audit") {
    SUBCASE("pure heat, q = 2: dissipation identity within 1e-3") {
        ProblemSpec spec = heat_problem(1, 512, 40.0, 3.0);
        AdvRunConfig cfg;
        cfg.t_final = 0.5;
        cfg.sample_stride = 10;
        cfg.audit_q = {2.0};
        auto result = run_advdiff(spec, cfg);
        bool found = false;
        for (const auto& c : result.certificates)
            if (c.name.rfind("energy_identity", 0) == 0) {
                CHECK(c.pass);
                found = true;
            }
        CHECK(found);
    }

    SUBCASE("b = beta(t) makes the transport term vanish identically") {
        ProblemSpec spec = heat_problem(1, 256, 20.0);
        spec.b = [](const ProblemSpec::Vec3&, double t, double, ProblemSpec::Vec3& out) {
            out = {1.0 + 0.5 * std::sin(t), 0.0, 0.0};
        };
        auto sample = energy_audit_sample(spec, spec.u0, 0.3, 2.0);
        CHECK(sample.transport == doctest::Approx(0.0).epsilon(1e-14));
    }

    SUBCASE("heterogeneous scenario at 256 cells: residual below 1e-2, shrinking on refinement") {
        double residual[2];
        for (int r = 0; r < 2; ++r) {
            const int cells = r == 0 ? 256 : 512;
            ProblemSpec spec = hetero_problem(1, cells, 20.0, 0.0, 1.0, 0.5);
            AdvRunConfig cfg;
            cfg.t_final = 0.4;
            cfg.sample_stride = 8;
            cfg.audit_q = {2.0};
            cfg.audit_tol = 1e-2;
            auto result = run_advdiff(spec, cfg);
            for (const auto& c : result.certificates)
                if (c.name.rfind("energy_identity", 0) == 0) {
                    residual[r] = c.lhs;
                    CHECK(c.pass);
                }
        }
        CHECK(residual[1] < residual[0]);
    }
}

TEST_CASE("linfty bound certificate") {
    SUBCASE("constant evaluation: K(3,0,1) = 8 and K(2,0,2) = 4") {
        CHECK(std::pow(2.0 * 1.0, 3.0 / (1.0 - 0.0)) == doctest::Approx(8.0));
        CHECK(std::pow(2.0 * 2.0, 2.0 / (2.0 - 0.0)) == doctest::Approx(4.0));
    }

    SUBCASE("p at the critical exponent rejected") {
        ProblemSpec spec = hetero_problem(1, 128, 20.0, 0.5, 1.0);
        AdvState state(spec, {0.5, 1.0});
        CHECK_THROWS_AS(linfty_bound_certificate(state, 0.5), std::domain_error);
    }

    SUBCASE("heterogeneous scenario stays below the bound") {
        ProblemSpec spec = hetero_problem(1, 256, 20.0, 0.3, 1.0);
        AdvRunConfig cfg;
        cfg.t_final = 1.0;
        cfg.linfty_p = 1.0;
        auto result = run_advdiff(spec, cfg);
        REQUIRE(!result.certificates.empty());
        CHECK(result.certificates.front().pass);
    }
}

TEST_CASE("global existence verdicts") {
    SUBCASE("subcritical kappa is global regardless of the datum") {
        ProblemSpec spec = hetero_problem(2, 32, 20.0, 0.25, 5.0);
        CHECK(global_existence_verdict(spec) == ExistenceVerdict::GlobalByI);
    }

    SUBCASE("critical case: equality of the mass condition counts as global") {
        ProblemSpec spec = hetero_problem(1, 256, 20.0, 1.0, 1.0);
        spec.bmu_infty = 1.0;
        // scale the datum so that ||u0||_1 = 1 exactly
        const double mass = lp_norm(spec.u0, 1.0);
        for (auto& v : spec.u0.values()) v /= mass;
        CHECK(global_existence_verdict(spec) == ExistenceVerdict::GlobalByII);
    }

    SUBCASE("supercritical condition (iii) evaluated directly") {
        // n = 1, kappa = 2, Bmu = 1: need ||u0||_1 ||u0||_inf <= 1/2
        ProblemSpec spec = hetero_problem(1, 256, 20.0, 2.0, 1.0);
        spec.bmu_infty = 1.0;
        const double mass = lp_norm(spec.u0, 1.0);
        const double sup = lp_norm(spec.u0, INFINITY);
        const double product = 0.4;  // target ||u0||_1 ||u0||_inf
        const double scale = std::sqrt(product / (mass * sup));
        for (auto& v : spec.u0.values()) v *= scale;
        CHECK(global_existence_verdict(spec) == ExistenceVerdict::GlobalByIII);
    }

    SUBCASE("missing Bmu bound yields unknown, not an error") {
        ProblemSpec spec = hetero_problem(1, 128, 20.0, 1.0, 1.0);
        spec.bmu_infty.reset();
        CHECK(global_existence_verdict(spec) == ExistenceVerdict::Unknown);
    }
}

TEST_CASE("fujita contrast") {
    SUBCASE("reaction with zero datum stays zero") {
        auto summary = fujita_contrast_run(1, 1.0, 0.0, FujitaMode::Reaction, 1.0, 128, 20.0);
        CHECK(summary.outcome == RunOutcome::Completed);
        CHECK(summary.max_sup == 0.0);
    }

    SUBCASE("subcritical reaction blows up in finite time") {
        auto summary = fujita_contrast_run(1, 1.0, 1.0, FujitaMode::Reaction, 50.0, 256, 40.0);
        CHECK(summary.outcome == RunOutcome::BlewUp);
        REQUIRE(summary.blow_up_time.has_value());
        CHECK(*summary.blow_up_time < 50.0);
    }

    SUBCASE("conservative analogue below 1/n stays bounded") {
        auto summary = fujita_contrast_run(1, 0.5, 1.0, FujitaMode::Conservative, 20.0, 256, 40.0);
        CHECK(summary.outcome == RunOutcome::Completed);
        CHECK(summary.max_sup <= 2.0);  // decays, never grows past the datum scale
    }
}

TEST_CASE("moser step certificates along a run") {
    ProblemSpec spec = hetero_problem(1, 256, 20.0, 0.0, 1.0);
    AdvRunConfig cfg;
    cfg.t_final = 0.5;
    cfg.moser_q = {2.0};
    auto result = run_advdiff(spec, cfg);
    bool found = false;
    for (const auto& c : result.certificates)
        if (c.name.rfind("moser_3_13", 0) == 0) {
            CHECK(c.pass);
            found = true;
        }
    CHECK(found);
}

TEST_CASE("coefficient audit") {
    ProblemSpec spec = hetero_problem(1, 128, 20.0, 0.0, 1.0);
    CHECK_NOTHROW(audit_coefficients(spec, 0.0, -1.0, 1.0));
    // a violating tensor: smaller than the declared floor
    spec.A = [](const ProblemSpec::Vec3&, double, double, ProblemSpec::Mat3& out) {
        out = {};
        for (int d = 0; d < 3; ++d) out[d][d] = 0.1;
    };
    CHECK_THROWS_AS(audit_coefficients(spec, 0.0, -1.0, 1.0), std::invalid_argument);
}
