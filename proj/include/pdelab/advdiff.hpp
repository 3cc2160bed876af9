#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pdelab/certificate.hpp"
#include "pdelab/grid.hpp"
#include "pdelab/series.hpp"

namespace pdelab {

// Conservative advection-diffusion problem
//   u_t + div( b(x,t,u) |u|^k u ) + div f(t,u) = div( A(x,t,u) grad u )
// on the periodic box, with ellipticity floor <A v, v> >= mu(t) |v|^2.
struct ProblemSpec {
    using Vec3 = std::array<double, 3>;
    using Mat3 = std::array<std::array<double, 3>, 3>;

    int dim = 1;
    double kappa = 0.0;
    double p0 = 1.0;

    std::function<void(const Vec3& x, double t, double u, Vec3& out)> b;
    std::function<void(double t, double u, Vec3& out)> f;
    // Engquist-Osher split of f: F_face = f_plus(uL) + f_minus(uR).  When
    // absent, f is folded into the Lax-Friedrichs flux.
    std::function<void(double t, double u, Vec3& out)> f_plus, f_minus;
    std::function<void(const Vec3& x, double t, double u, Mat3& out)> A;
    std::function<double(double t)> mu;

    bool b_depends_on_u = false;  // false: LLF speed bound is exact
    bool a_diagonal = true;       // false: assemble cross-derivative fluxes

    Field u0;
    std::optional<double> bmu_infty;  // analytic sup of B(t)/mu(t), for the verdicts

    // pointwise reaction source g(t,u) (Fujita contrast); conservative runs
    // leave it empty -- mass is then conserved exactly.
    std::function<double(double t, double u)> source;

    double sup_cap_factor = 1e6;
    double dt_floor = 1e-10;
};

// Sampled tracker record.  bmu_run and up_run are running suprema and
// therefore nondecreasing; mass is signed and kept separate from the
// nonnegative norm series.
struct TrackerState {
    NormSeries b_series{"B"};
    NormSeries bmu_series{"Bmu_run"};
    NormSeries sup_series{"sup"};
    NormSeries mu_int_series{"mu_int"};
    std::map<double, NormSeries> lp_series;      // p -> ||u(t)||_p samples
    std::map<double, NormSeries> up_run_series;  // p -> running sup samples
    std::vector<std::pair<double, double>> mass_samples;
};

// Componentwise half-oscillation of b along the current solution:
//   B_j = (sup_x b_j - inf_x b_j)/2,  B = |(B_1..B_n)|_2.
std::pair<std::array<double, 3>, double> oscillation_b(const ProblemSpec& spec, const Field& u,
                                                       double t);
// Midrange vector beta_j = (sup_x b_j + inf_x b_j)/2.
std::array<double, 3> midrange_b(const ProblemSpec& spec, const Field& u, double t);

// Probes the ellipticity floor <A v, v> >= mu(t) |v|^2 and the boundedness
// of b on random (x, u) samples; throws on violation.
void audit_coefficients(const ProblemSpec& spec, double t, double u_lo, double u_hi,
                        unsigned seed = 7);

class AdvState {
  public:
    AdvState(const ProblemSpec& spec, std::vector<double> tracked_p);

    const Field& u() const { return u_; }
    double t() const { return t_; }
    const TrackerState& trackers() const { return trackers_; }
    const ProblemSpec& spec() const { return *spec_; }
    double initial_sup() const { return sup0_; }
    double initial_lp(double p) const;
    double current_b() const { return last_b_; }
    double bmu_run() const { return bmu_run_; }
    double up_run(double p) const;
    double mu_integral() const { return mu_integral_; }
    long steps() const { return steps_; }
    const std::vector<double>& tracked_p() const { return tracked_p_; }

    // Largest stable step at the current state (advective + diffusive CFL,
    // plus the source rate when present).
    double stable_dt(double cfl) const;

    // One SSP-RK2 step in conservative flux form; discrete mass is exact.
    // Throws BlowUpError on sup-norm cap, NaN, or dt below the floor.
    void step(double dt);

    // Append one row to every tracker series at the current time.
    void record_sample();

    // Dense per-step ||u||_q^q series for the energy audits.
    void track_q_power(double q);
    const NormSeries& q_power_series(double q) const;

  private:
    std::vector<double> rhs(const std::vector<double>& u, double t) const;
    void update_running(double dt_just_taken);

    const ProblemSpec* spec_;
    Field u_;
    double t_ = 0.0;
    double sup0_ = 0.0;
    long steps_ = 0;
    std::vector<double> tracked_p_;
    TrackerState trackers_;
    std::map<double, NormSeries> q_power_;
    std::map<double, double> u0_lp_;
    std::map<double, double> up_run_;
    double bmu_run_ = 0.0;
    double mu_integral_ = 0.0;
    double mu_prev_ = 0.0;
    double last_b_ = 0.0;
};

// --- certificates -----------------------------------------------------------

// ||u(t)||_p <= ||u0||_p exp{ (p-1)/4 Bmu^2 Up^{2k} int_0^t mu } at every
// recorded sample, with the running trackers on the right side.
BoundCertificate lp_growth_certificate(const AdvState& state, double p, double tol = 1e-6);

// Sup-norm bound of the iteration theorem:
//   ||u(t)||_inf <= (2p)^{n/(p-nk)} max{ ||u0||_inf; Bmu^{n/(p-nk)} Up^{p/(p-nk)} }.
BoundCertificate linfty_bound_certificate(const AdvState& state, double p, double tol = 1e-6);

// One snapshot of the L^q energy balance, gradients by centered differences.
struct EnergyAuditSample {
    double t = 0.0;
    double dissipation = 0.0;  // q(q-1) int |u|^{q-2} <A grad u, grad u>
    double transport = 0.0;    // q(q-1) int |u|^{q-2+k} u <b - beta, grad u>
};

EnergyAuditSample energy_audit_sample(const ProblemSpec& spec, const Field& u, double t,
                                      double q);

// Residual of d/dt ||u||_q^q + dissipation = transport at interior samples,
// the derivative read from the dense q-power series.
BoundCertificate energy_identity_audit(const AdvState& state,
                                       const std::vector<EnergyAuditSample>& samples, double q,
                                       double tol = 1e-3);

enum class ExistenceVerdict { GlobalByI, GlobalByII, GlobalByIII, Unknown };
const char* to_string(ExistenceVerdict v);

// Sufficient global-existence conditions:
//  (i) k < 1/n; (ii) k = 1/n and ||u0||_1 <= Bmu^{-n};
//  (iii) k > 1/n and ||u0||_1 ||u0||_inf^{nk-1} <= (nk Bmu)^{-n}.
// (ii)/(iii) return Unknown when no analytic Bmu bound was declared.
ExistenceVerdict global_existence_verdict(const ProblemSpec& spec);

// --- run driver -------------------------------------------------------------

enum class RunOutcome { Completed, BlewUp };

struct AdvRunConfig {
    double t_final = 1.0;
    double cfl = 0.45;
    int sample_stride = 20;
    std::vector<double> tracked_p = {1.0, 2.0};
    std::vector<double> audit_q;       // energy-identity audits
    double audit_tol = 1e-3;
    std::vector<double> moser_q;       // growth-episode certificates
    double moser_tol = 5e-2;
    double linfty_p = 0.0;             // 0: skip
    double lp_growth_p = 0.0;          // 0: skip
    long max_steps = 50'000'000;
};

struct AdvRunResult {
    RunOutcome outcome = RunOutcome::Completed;
    double end_time = 0.0;
    std::optional<double> blow_up_time;
    double max_sup = 0.0;
    long steps = 0;
    std::vector<BoundCertificate> certificates;
    TrackerState trackers;
};

AdvRunResult run_advdiff(const ProblemSpec& spec, const AdvRunConfig& config);

// Fujita-contrast runner: Reaction integrates u_t = Lap u + |u|^k u (no
// advection); Conservative the divergence-form analogue with a compressive
// b region.  Returns bounded-through-horizon or the blow-up time.
enum class FujitaMode { Reaction, Conservative };

struct FujitaSummary {
    RunOutcome outcome;
    std::optional<double> blow_up_time;
    double max_sup;
    double horizon;
};

FujitaSummary fujita_contrast_run(int dim, double kappa, double amplitude, FujitaMode mode,
                                  double horizon, int cells = 256, double box = 40.0);

} // namespace pdelab
