#include <doctest.h>

#include <cmath>

#include "pdelab/moser.hpp"

using namespace pdelab;

TEST_CASE("lambda_q closed form") {
    SUBCASE("all factors unity: n=1, kappa=0, q=2, K=1") {
        IterationParams pr(1, 0.0, 1.0, 1.0);
        CHECK(lambda_q(pr, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("n=2, kappa=0, q=4 gives sqrt(2)") {
        IterationParams pr(2, 0.0, 2.0, 1.0);
        CHECK(lambda_q(pr, 4.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    }
    SUBCASE("singular exponent rejected") {
        IterationParams pr(1, 1.0, 2.0, 1.0);  // 2 n kappa = 2
        CHECK_THROWS_AS(lambda_q(pr, 4.0 - 2.0), std::domain_error);
    }
    SUBCASE("lambda decreases toward 1 along the doubling ladder") {
        IterationParams pr(3, 0.2, 2.0, 1.0);
        double prev = INFINITY;
        for (int l = 1; l <= 12; ++l) {
            const double lam = lambda_q(pr, std::ldexp(pr.p, l));
            CHECK(lam >= 1.0);
            CHECK(lam - 1.0 < prev - 1.0);
            prev = lam;
        }
        CHECK(prev - 1.0 < 1e-2);
    }
}

TEST_CASE("C(j,m) products") {
    SUBCASE("single factor with unit exponent: C(1,1) = lambda(2p)") {
        IterationParams pr(2, 0.3, 1.0, 1.0);
        CHECK(c_jm(pr, 1, 1) == doctest::Approx(lambda_q(pr, 2.0 * pr.p)).epsilon(1e-14));
    }

    SUBCASE("kappa = 0 closed form vs independent log-sum oracle") {
        // C(1,m) = prod_{l=1}^m (2^{l-1} p)^{n/(2^l p)}
        for (double p : {1.0, 2.0, 5.0}) {
            for (int n = 1; n <= 3; ++n) {
                IterationParams pr(n, 0.0, p, 1.0);
                for (int m = 1; m <= 12; ++m) {
                    double oracle_log = 0.0;
                    for (int l = 1; l <= m; ++l)
                        oracle_log += n / (std::ldexp(p, l)) * std::log(std::ldexp(p, l - 1));
                    const double oracle = std::exp(oracle_log);
                    CHECK(c_jm(pr, 1, m) == doctest::Approx(oracle).epsilon(1e-12));
                }
            }
        }
    }

    SUBCASE("uniform bound C(j,m) <= (2p)^{n/(p-nk)} on a parameter grid") {
        for (double p : {1.0, 2.0, 5.0})
            for (int n = 1; n <= 3; ++n)
                for (double kappa : {0.0, 0.1, 0.25 * p / n, 0.45 * p / n}) {
                    IterationParams pr(n, kappa, p, 1.0);
                    const double cap = iteration_constant(pr);
                    for (int m = 1; m <= 20; ++m)
                        for (int j = 1; j <= m; ++j)
                            CHECK(c_jm(pr, j, m) < cap);
                }
    }

    SUBCASE("j > m rejected") {
        IterationParams pr(1, 0.0, 1.0, 1.0);
        CHECK_THROWS_AS(c_jm(pr, 3, 2), std::domain_error);
    }
}

TEST_CASE("telescoping identities") {
    SUBCASE("kappa = 0 reduces to a geometric series") {
        IterationParams pr(2, 0.0, 3.0, 1.0);
        auto [a, b] = telescoping_check(pr, 6);
        CHECK(a.pass);
        CHECK(b.pass);
        CHECK(a.lhs == doctest::Approx((1.0 - std::ldexp(1.0, -6)) / 3.0).epsilon(1e-14));
    }

    SUBCASE("p=1, n=2, kappa=0.25, m=3: rhs of (a) equals 28/15") {
        IterationParams pr(2, 0.25, 1.0, 1.0);
        auto [a, b] = telescoping_check(pr, 3);
        CHECK(a.rhs == doctest::Approx(28.0 / 15.0).epsilon(1e-14));
        CHECK(a.pass);
        CHECK(b.pass);
    }

    SUBCASE("identities hold to 1e-12 across the test grid") {
        for (double p : {1.0, 2.0, 5.0})
            for (int n = 1; n <= 3; ++n)
                for (double kappa : {0.0, 0.2 * p / n, 0.49 * p / n}) {
                    IterationParams pr(n, kappa, p, 1.0);
                    for (int m : {1, 5, 20}) {
                        auto [a, b] = telescoping_check(pr, m);
                        CHECK(a.pass);
                        CHECK(b.pass);
                    }
                }
    }
}

TEST_CASE("recursion bound") {
    auto gaussian_ladder = [](const IterationParams& pr, double amp, double width, int m) {
        std::vector<double> norms;
        for (int l = 0; l <= m; ++l)
            norms.push_back(gaussian_lp_norm(pr.n, amp, width, std::ldexp(pr.p, l)));
        return norms;
    };

    SUBCASE("m = 1 closed form reduces to the single-doubling estimate") {
        IterationParams pr(1, 0.3, 1.0, 1.0);
        auto norms = gaussian_ladder(pr, 2.0, 1.5, 1);
        const double bmu = 0.7, up = 1.9;
        auto rb = recursion_bound(pr, norms, bmu, up, 1);
        const double lam = lambda_q(pr, 2.0 * pr.p);
        const double nk = pr.n * pr.kappa;
        const double expect = std::max(
            norms[1], lam * std::pow(bmu, pr.n / (2.0 * pr.p - 2.0 * nk)) *
                          std::pow(up, (2.0 * pr.p - nk) / (2.0 * pr.p - 2.0 * nk)));
        CHECK(rb.recursive == doctest::Approx(expect).epsilon(1e-14));
    }

    SUBCASE("oscillation-free case collapses to the datum norm") {
        IterationParams pr(2, 0.2, 1.0, 1.0);
        auto norms = gaussian_ladder(pr, 1.0, 1.0, 4);
        auto rb = recursion_bound(pr, norms, 0.0, 0.5, 4);
        CHECK(rb.closed_form ==
              doctest::Approx(iteration_constant(pr) * norms[4]).epsilon(1e-14));
    }

    SUBCASE("exponents converge to the sup-norm estimate by m = 50") {
        IterationParams pr(3, 0.2, 1.0, 1.0);
        const double nk = pr.n * pr.kappa;
        const int m = 50;
        const double e_b = pr.n * (1.0 - std::ldexp(1.0, -m)) / (pr.p - nk);
        const double e_u = (pr.p - std::ldexp(nk, -m)) / (pr.p - nk);
        CHECK(std::abs(e_b - pr.n / (pr.p - nk)) < 1e-12);
        CHECK(std::abs(e_u - pr.p / (pr.p - nk)) < 1e-12);
    }

    SUBCASE("recursive value never exceeds the closed form on consistent ladders") {
        for (int n = 1; n <= 3; ++n)
            for (double kappa : {0.0, 0.15, 0.3})
                for (double p : {1.0, 2.0})
                    for (double bmu : {0.0, 0.5, 2.0})
                        for (double amp : {0.5, 2.0}) {
                            if (!(p > n * kappa)) continue;
                            IterationParams pr(n, kappa, p, 1.0);
                            const int m = 8;
                            auto norms = gaussian_ladder(pr, amp, 1.2, m);
                            // Up must dominate the datum norm it tracks.
                            const double up = 1.5 * norms[0];
                            auto rb = recursion_bound(pr, norms, bmu, up, m);
                            CHECK(rb.recursive <= rb.closed_form * (1.0 + 1e-12));
                        }
    }

    SUBCASE("monotone in Bmu and Up") {
        IterationParams pr(2, 0.25, 1.0, 1.0);
        auto norms = gaussian_ladder(pr, 1.0, 1.0, 5);
        auto base = recursion_bound(pr, norms, 1.0, 1.0, 5);
        CHECK(recursion_bound(pr, norms, 1.5, 1.0, 5).closed_form >= base.closed_form);
        CHECK(recursion_bound(pr, norms, 1.0, 1.5, 5).closed_form >= base.closed_form);
        CHECK(recursion_bound(pr, norms, 1.5, 1.0, 5).recursive >= base.recursive);
        CHECK(recursion_bound(pr, norms, 1.0, 1.5, 5).recursive >= base.recursive);
    }

    SUBCASE("m < 1 rejected") {
        IterationParams pr(1, 0.0, 1.0, 1.0);
        CHECK_THROWS_AS(recursion_bound(pr, {1.0}, 1.0, 1.0, 0), std::domain_error);
    }
}

TEST_CASE("growth-episode certificate") {
    IterationParams pr(1, 0.0, 1.0, 1.0);

    SUBCASE("falling L^q mass is inert") {
        StepSample s{2.0, -0.5, 3.0, 2.0, 1.0, 1.0};
        auto cert = step_certificate_3_13(pr, s);
        CHECK(cert.pass);
        CHECK(cert.indeterminate);
    }

    SUBCASE("growth episode evaluated against the Nash-based bound") {
        // q=2, n=1, kappa=0: bound = 1^{1} * 1^{1} (B/mu)^{1} ||u||_1^{1} -> B/mu * L1.
        StepSample s{2.0, +1.0, 0.5, 2.0, 1.0, 1.0};
        auto cert = step_certificate_3_13(pr, s);
        CHECK(!cert.indeterminate);
        CHECK(cert.pass);
        CHECK(cert.rhs == doctest::Approx(2.0).epsilon(1e-12));
    }

    SUBCASE("violating sample fails") {
        StepSample s{2.0, +1.0, 5.0, 2.0, 1.0, 1.0};
        auto cert = step_certificate_3_13(pr, s);
        CHECK(!cert.pass);
    }

    SUBCASE("q at the singular exponent rejected") {
        IterationParams pr2(1, 1.0, 1.5, 1.0);
        StepSample s{2.0, +1.0, 1.0, 1.0, 1.0, 1.0};
        CHECK_THROWS_AS(step_certificate_3_13(pr2, s), std::domain_error);
    }
}

TEST_CASE("ledger rows") {
    IterationParams pr(1, 0.0, 1.0, 1.0);
    std::vector<double> norms;
    for (int l = 0; l <= 10; ++l)
        norms.push_back(gaussian_lp_norm(1, 1.0, 1.0, std::ldexp(1.0, l)));
    auto ledger = build_ledger(pr, norms, 0.8, 1.2, 10);
    REQUIRE(ledger.rows.size() == 10);
    for (const auto& row : ledger.rows) {
        CHECK(row.q == doctest::Approx(std::ldexp(1.0, row.level)));
        CHECK(row.c_1m < iteration_constant(pr));
        CHECK(row.bound > 0.0);
    }
}
