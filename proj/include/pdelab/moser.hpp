#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pdelab/certificate.hpp"

namespace pdelab {

// Parameters of the L^p-L^q iteration: dimension, advection exponent kappa,
// base integrability p (p >= p0 and p > n*kappa), and the Nash constant to
// instantiate bounds with.  K_nash = 1.0 keeps everything a rigorous upper
// bound; the sharper Carlen-Loss value is opt-in.
struct IterationParams {
    int n;
    double kappa;
    double p;
    double k_nash = 1.0;

    IterationParams(int n_, double kappa_, double p_, double k_nash_ = 1.0);
};

// lambda(q) = K(n)^{2/q} (q/2)^{n/(q - 2 n kappa)}, q > 2 n kappa.
double lambda_q(const IterationParams& params, double q);

// C(j,m) = prod_{l=j}^{m} lambda(2^l p)^{(p - 2^{-m} n kappa)/(p - 2^{-l} n kappa)},
// evaluated in the log domain.
double c_jm(const IterationParams& params, int j, int m);

// K(n,kappa,p) = (2p)^{n/(p - n kappa)}: the uniform bound dominating every
// C(j,m) and the constant of the final sup-norm estimate.
double iteration_constant(const IterationParams& params);

// Telescoping identities behind the C(j,m) bound:
//   sum_{l=1}^m 2^l p / ((2^l p - 2nk)(2^l p - nk))
//       = 1/(p-nk) - 1/(2^m p - nk)
//   sum_{l=1}^m l 2^l p / ((2^l p - 2nk)(2^l p - nk))
//       = 1/(p-nk) - (m+1)/(2^m p - nk) + sum_{l=1}^m 1/(2^l p - nk)
// Both sides evaluated independently; pass at 1e-12 relative.
std::pair<BoundCertificate, BoundCertificate> telescoping_check(const IterationParams& params,
                                                                int m);

// Result of the level-m sup-norm recursion.
struct RecursionBound {
    double closed_form;  // simplified bound with K(n,kappa,p)
    double recursive;    // full recursion through every level
};

// Bound on the running supremum of ||u||_{2^m p}:
//   closed_form = K(n,kappa,p) max{ ||u0||_{2^m p};
//                   Bmu^{n(1-2^{-m})/(p-nk)} Up^{(p - nk/2^m)/(p-nk)} }
// recursive iterates the one-level estimate
//   V_l = max{ ||u0||_{2^l p}; lambda(2^l p) Bmu^{n/(2^l p - 2nk)}
//              V_{l-1}^{(2^l p - nk)/(2^l p - 2nk)} },  V_0 = Up.
// u0_norms[l] must hold ||u0||_{2^l p} for l = 0..m (a consistent ladder of
// norms of one actual function).
RecursionBound recursion_bound(const IterationParams& params,
                               const std::vector<double>& u0_norms, double bmu, double up,
                               int m);

// One sample of an evolving solution as seen by the growth-episode bound.
struct StepSample {
    double q;          // current Lebesgue exponent, q > 2 n kappa
    double dlq_dt;     // discrete time derivative of ||u||_q^q
    double lq;         // ||u(t)||_q
    double lq_half;    // ||u(t)||_{q/2}
    double b;          // oscillation B(t)
    double mu;         // ellipticity floor mu(t)
};

// Growth-episode certificate: inert (auto-pass) when ||u||_q^q is falling;
// otherwise checks
//   ||u||_q <= K^{2/q} (q/2)^{n/(q-2nk)} (B/mu)^{n/(q-2nk)}
//              ||u||_{q/2}^{(q-nk)/(q-2nk)}.
BoundCertificate step_certificate_3_13(const IterationParams& params, const StepSample& sample,
                                       double tol = 5e-2);

// Ledger of the iteration bookkeeping, one row per doubling level.
struct LedgerRow {
    int level;
    double q;
    double lambda;
    double c_1m;
    double bound;  // recursion closed form at this level
};

struct BoundLedger {
    std::vector<LedgerRow> rows;
};

BoundLedger build_ledger(const IterationParams& params, const std::vector<double>& u0_norms,
                         double bmu, double up, int m_max);

// Closed-form L^p ladder of a Gaussian a*exp(-|x|^2 / (2 w^2)) on R^n;
// handy for building consistent datum-norm ladders.
double gaussian_lp_norm(int n, double amp, double width, double p);

} // namespace pdelab
