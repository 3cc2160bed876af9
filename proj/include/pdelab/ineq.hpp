#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdelab/certificate.hpp"
#include "pdelab/grid.hpp"

namespace pdelab {

// Closed-form sample: a Gaussian-mixture / windowed trigonometric profile.
// Keeping samples analytic lets the scaling audit re-grid exact dilations.
struct AnalyticSample {
    struct Bump {
        double amp;
        std::array<double, 3> center;
        double sigma;
    };
    struct Mode {
        double amp;
        std::array<double, 3> freq;  // angular wavenumbers
        double phase;
    };
    std::vector<Bump> bumps;
    std::vector<Mode> modes;      // multiplied by the window when present
    double window_sigma = 0.0;    // 0: no window

    double eval(const std::array<double, 3>& x, int dim) const;
    AnalyticSample dilated(double lambda) const;  // v(x) -> v(lambda x)
    AnalyticSample scaled(double c) const;        // v -> c v
    Field materialize(const GridSpec& grid) const;
};

// Thrown when a periodic sample cannot stand in for an R^n function.
struct RejectedSampleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One functional inequality LHS <= K * RHS with its evaluator.
struct InequalitySpec {
    std::string name;
    int dim;
    double constant;
    double tol = 1e-3;
    // returns {lhs, rhs-without-constant}
    std::function<std::pair<double, double>(const Field&)> evaluate;
};

// Registry of the audited inequalities.
InequalitySpec make_nash(int n, double k_nash = 1.0);
InequalitySpec make_gn_sup_d2();                    // ||u||_inf vs ||u||_2, ||D^2 u||_2 (n=3)
InequalitySpec make_gn_d1();                        // ||Du||_2 interpolation (n=3)
InequalitySpec make_gn_combined();                  // product form (n=3)
InequalitySpec make_gn_l1_family(int n, double r);  // ||v||_r <= ||v||_1^{1-th} ||grad v||_2^{th}
InequalitySpec make_gn_l4(double constant = 1.0);   // ||u||_4 (n=3)
InequalitySpec make_gn_l3();                        // ||u||_3 (n=3, Agueh constant)

// Evaluates the inequality on one field.  Rejects fields whose boundary
// tails exceed 1e-10 of the peak (the R^n constants do not transfer).
BoundCertificate audit(const InequalitySpec& ineq, const Field& field);

struct CorpusSummary {
    int count = 0;
    int passes = 0;
    int rejected = 0;
    double max_ratio = 0.0;
    std::vector<std::string> failures;
    bool all_pass() const { return passes == count - rejected && count > rejected; }
};

struct CorpusSpec {
    GridSpec grid;
    int components = 1;
    unsigned seed = 1;
};

// Seeded corpus runner: random Gaussian mixtures, windowed band-limited
// fields and multi-bump sums.
CorpusSummary corpus_audit(const InequalitySpec& ineq, const CorpusSpec& corpus, int count);

// Draw the i-th corpus sample (deterministic in (seed, i)).
AnalyticSample corpus_sample(const CorpusSpec& corpus, int index);

// Dimensional self-test: the empirical ratio must be invariant under
// amplitude scalings (1e-12) and dilations v(x) -> v(2x) (1e-8).
BoundCertificate scaling_audit(const InequalitySpec& ineq, const GridSpec& grid,
                               const AnalyticSample& sample);

} // namespace pdelab
