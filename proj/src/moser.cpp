#include "pdelab/moser.hpp"

#include <cmath>
#include <stdexcept>

namespace pdelab {

IterationParams::IterationParams(int n_, double kappa_, double p_, double k_nash_)
    : n(n_), kappa(kappa_), p(p_), k_nash(k_nash_) {
    if (n < 1 || n > 3) throw std::invalid_argument("IterationParams: n must be 1..3");
    if (kappa < 0.0) throw std::invalid_argument("IterationParams: kappa must be >= 0");
    if (!(p > n * kappa)) throw std::invalid_argument("IterationParams: need p > n*kappa");
    if (!(k_nash > 0.0)) throw std::invalid_argument("IterationParams: K_nash must be positive");
}

namespace {
double log_lambda(const IterationParams& pr, double q) {
    const double nk2 = 2.0 * pr.n * pr.kappa;
    if (!(q > nk2)) throw std::domain_error("lambda_q: q must exceed 2 n kappa");
    return (2.0 / q) * std::log(pr.k_nash) + pr.n / (q - nk2) * std::log(q / 2.0);
}
} // namespace

double lambda_q(const IterationParams& params, double q) {
    if (q < 2.0 * params.p) throw std::domain_error("lambda_q: q must be >= 2p");
    return std::exp(log_lambda(params, q));
}

double c_jm(const IterationParams& params, int j, int m) {
    if (!(1 <= j && j <= m)) throw std::domain_error("c_jm: need 1 <= j <= m");
    const double nk = params.n * params.kappa;
    const double wm = params.p - std::ldexp(nk, -m);  // p - nk/2^m
    double acc = 0.0;
    for (int l = j; l <= m; ++l) {
        const double wl = params.p - std::ldexp(nk, -l);
        acc += wm / wl * log_lambda(params, std::ldexp(params.p, l));
    }
    return std::exp(acc);
}

double iteration_constant(const IterationParams& params) {
    return std::pow(2.0 * params.p, params.n / (params.p - params.n * params.kappa));
}

std::pair<BoundCertificate, BoundCertificate> telescoping_check(const IterationParams& params,
                                                                int m) {
    if (m < 1) throw std::domain_error("telescoping_check: m >= 1");
    const double p = params.p;
    const double nk = params.n * params.kappa;

    double lhs_a = 0.0, lhs_b = 0.0, tail = 0.0;
    for (int l = 1; l <= m; ++l) {
        const double ql = std::ldexp(p, l);
        const double term = ql / ((ql - 2.0 * nk) * (ql - nk));
        lhs_a += term;
        lhs_b += l * term;
        tail += 1.0 / (ql - nk);
    }
    const double qm = std::ldexp(p, m);
    const double rhs_a = 1.0 / (p - nk) - 1.0 / (qm - nk);
    const double rhs_b = 1.0 / (p - nk) - (m + 1.0) / (qm - nk) + tail;

    auto make = [](const char* name, double lhs, double rhs) {
        BoundCertificate c;
        c.name = name;
        c.lhs = lhs;
        c.rhs = rhs;
        c.constant = 1.0;
        c.margin = rhs - lhs;
        c.ratio = rhs != 0.0 ? lhs / rhs : 1.0;
        c.pass = std::abs(lhs - rhs) < 1e-12 * std::abs(rhs);
        return c;
    };
    return {make("telescoping_a", lhs_a, rhs_a), make("telescoping_b", lhs_b, rhs_b)};
}

RecursionBound recursion_bound(const IterationParams& params,
                               const std::vector<double>& u0_norms, double bmu, double up,
                               int m) {
    if (m < 1) throw std::domain_error("recursion_bound: m >= 1");
    if (static_cast<int>(u0_norms.size()) < m + 1)
        throw std::invalid_argument("recursion_bound: need u0 norms for levels 0..m");
    if (!(bmu >= 0.0 && up >= 0.0))
        throw std::invalid_argument("recursion_bound: inputs must be nonnegative");

    const double p = params.p;
    const double nk = params.n * params.kappa;

    // Closed form at level m.
    const double e_b = params.n * (1.0 - std::ldexp(1.0, -m)) / (p - nk);
    const double e_u = (p - std::ldexp(nk, -m)) / (p - nk);
    const double closed =
        iteration_constant(params) *
        std::max(u0_norms[m], std::pow(bmu, e_b) * std::pow(up, e_u));

    // Full recursion, one doubling at a time.
    double v = up;
    for (int l = 1; l <= m; ++l) {
        const double ql = std::ldexp(p, l);
        const double lam = std::exp(log_lambda(params, ql));
        const double eb = params.n / (ql - 2.0 * nk);
        const double eu = (ql - nk) / (ql - 2.0 * nk);
        v = std::max(u0_norms[l], lam * std::pow(bmu, eb) * std::pow(v, eu));
    }
    return {closed, v};
}

BoundCertificate step_certificate_3_13(const IterationParams& params, const StepSample& sample,
                                       double tol) {
    const double nk2 = 2.0 * params.n * params.kappa;
    if (!(sample.q > nk2)) throw std::domain_error("step_certificate_3_13: q must exceed 2 n kappa");

    // Falling L^q mass makes the implication vacuous.
    const double deadband = 1e-14 * std::max(1.0, std::pow(sample.lq, sample.q));
    if (sample.dlq_dt < deadband) {
        BoundCertificate c;
        c.name = "step_3_13";
        c.pass = true;
        c.indeterminate = true;  // inert: hypothesis not triggered
        return c;
    }
    const double expo = params.n / (sample.q - nk2);
    const double rhs = std::pow(params.k_nash, 2.0 / sample.q) *
                       std::pow(sample.q / 2.0, expo) *
                       std::pow(sample.b / sample.mu, expo) *
                       std::pow(sample.lq_half, (sample.q - params.n * params.kappa) /
                                                    (sample.q - nk2));
    return BoundCertificate::make("step_3_13", sample.lq, rhs, 1.0, tol);
}

BoundLedger build_ledger(const IterationParams& params, const std::vector<double>& u0_norms,
                         double bmu, double up, int m_max) {
    BoundLedger ledger;
    for (int l = 1; l <= m_max; ++l) {
        LedgerRow row;
        row.level = l;
        row.q = std::ldexp(params.p, l);
        row.lambda = lambda_q(params, row.q);
        row.c_1m = c_jm(params, 1, l);
        row.bound = recursion_bound(params, u0_norms, bmu, up, l).closed_form;
        ledger.rows.push_back(row);
    }
    return ledger;
}

double gaussian_lp_norm(int n, double amp, double width, double p) {
    // int (a e^{-|x|^2/(2w^2)})^p dx = a^p (2 pi w^2 / p)^{n/2}
    return amp * std::pow(2.0 * M_PI * width * width / p, 0.5 * n / p);
}

} // namespace pdelab
