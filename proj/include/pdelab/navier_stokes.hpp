#pragma once

#include <optional>
#include <vector>

#include "pdelab/certificate.hpp"
#include "pdelab/grid.hpp"
#include "pdelab/series.hpp"

namespace pdelab {

struct CflError : std::runtime_error {
    double suggested_dt;
    CflError(double dt) : std::runtime_error("CFL violation"), suggested_dt(dt) {}
};

struct BlowUpError : std::runtime_error {
    double t;
    BlowUpError(double t_) : std::runtime_error("blow-up suspected"), t(t_) {}
};

// Per-step norm history of one solver instance.  diss carries the running
// dissipation integral 2 nu int_0^t ||Du||_2^2 ds (trapezoid).
struct NSHistory {
    std::vector<double> t;
    std::vector<double> l2;
    std::vector<double> du_l2;
    std::vector<std::vector<double>> dm_l2;  // [m-1][step] for m = 1..m_max
    std::vector<double> diss;
};

class NSState {
  public:
    // u0 is dealiased and Leray-projected on construction.
    NSState(Field u0, double nu, int m_max = 4, double cfl_limit = 0.5);

    const Field& u() const { return u_; }
    double t() const { return t_; }
    double nu() const { return nu_; }
    int m_max() const { return m_max_; }
    const NSHistory& history() const { return history_; }
    double initial_l2() const { return history_.l2.front(); }

    // One integrating-factor RK4 step: diffusion exact in spectral space,
    // nonlinearity explicit, divergence-free invariant preserved.
    void step(double dt);

    double max_divergence() const;  // max_k |k . u_hat(k)|

  private:
    void record();

    Field u_;
    double t_ = 0.0;
    double nu_;
    int m_max_;
    double cfl_limit_;
    NSHistory history_;
};

struct LerayCheckpoint {
    double t0;
    Field u_at_t0;
};

// Helmholtz/Leray projection onto divergence-free fields (zero mode kept).
Field leray_project(const Field& v);

// Q = P[-u . grad u], computed pseudospectrally with 2/3 dealiasing.
Field nonlinear_term(const Field& u);

// Energy inequality ||u(t)||^2 + 2 nu int ||Du||^2 <= ||u0||^2, evaluated
// from the recorded history at the latest time.
BoundCertificate energy_certificate(const NSState& state, double tol = 1e-6);

// Per-sample relative energy residual (LHS - RHS)/||u0||^2 at step i.
double energy_residual(const NSState& state, std::size_t i);

// ||e^{nu Lap tau} Q(s)||_2 <= (8 pi)^{-3/4} nu^{-3/4} tau^{-3/4}
//     ||u(s)||_2 ||Du(s)||_2, three dimensions only.
BoundCertificate q_estimate_certificate(const Field& u_at_s, double nu, double s, double t,
                                        double tol = 5e-2);
BoundCertificate q_estimate_certificate(const NSState& state, double s, double t,
                                        double tol = 5e-2);

// Weighted decay pair at the state's current time:
//   first  = t^{m/2} ||D^m u(t)||_2
//   second = t^{(n-2)/4 + m/2} ||D^m (u(t) - e^{nu Lap (t-t0)} u(t0))||_2
std::pair<double, double> decay_monitor_sample(const NSState& state, const LerayCheckpoint& cp,
                                               int m);

// Earliest recorded time after which ||Du||_2 is nonincreasing for the rest
// of the run.  Decrease violations below 1e-9 relative are step noise.
std::optional<double> gradient_monotonicity_onset(const NSState& state);

// (1/2) K3^12 nu^{-5} ||u0||_2^4; strictly below 0.000753026 nu^{-5} ||u0||^4.
double tstar_bound(double nu, double u0_l2);

// Trilinear gradient estimate
//   int sum |D_l u_i||D_l u_j||D_j u_i| dx <= K3^3 ||Du||_2^{3/2} ||D^2 u||_2^{3/2},
// three dimensions only.
BoundCertificate trilinear_certificate(const Field& u, double tol = 1e-3);

// --- presets ---------------------------------------------------------------

Field taylor_green_2d(const GridSpec& grid, double amplitude = 1.0);
// Random band-limited divergence-free field, ||u||_2 normalized to target.
Field random_divfree_field(const GridSpec& grid, unsigned seed, double l2_target,
                           int max_freq = 3);

} // namespace pdelab
