#pragma once

#include <array>
#include <vector>

#include "pdelab/certificate.hpp"
#include "pdelab/grid.hpp"
#include "pdelab/series.hpp"

namespace pdelab {

struct HeatParams {
    double nu;
    GridSpec grid;
    HeatParams(double nu_, GridSpec grid_) : nu(nu_), grid(grid_) {
        if (!(nu > 0.0)) throw std::invalid_argument("HeatParams: nu must be positive");
    }
};

// Exact heat propagator: multiplies each spectral coefficient by
// exp(-nu |k|^2 tau).  tau = 0 is the identity.
Field apply_semigroup(const Field& field, double nu, double tau);

// Certificate for the L^r -> L^2 smoothing estimate
//   ||D^a e^{nu Lap tau} u||_2 <= K ||u||_r (nu tau)^{-n/2(1/r - 1/2) - |a|/2}.
// The literature gives no numerical K(n,m); the certificate records the
// empirical ratio and checks it against the configured constant.
BoundCertificate smoothing_certificate(const Field& u, double nu, double tau,
                                       const std::array<int, 3>& alpha, double r,
                                       double constant = 1.0, double tol = 1e-9);

enum class DecayWeight { HdotS, SupNorm };

// Weighted decay series of the heat flow started from u0:
//   HdotS:   t -> t^{s/2} ||e^{nu Lap t} u0||_{H^s}
//   SupNorm: t -> t^{n/4} ||e^{nu Lap t} u0||_inf
struct DecaySeriesSpec {
    DecayWeight kind = DecayWeight::HdotS;
    double s = 0.0;
};

NormSeries heat_decay_series(const Field& u0, double nu, const std::vector<double>& times,
                             const DecaySeriesSpec& spec);

// Geometric time ladder with the given points per decade.
std::vector<double> geometric_times(double t0, double t1, int per_decade = 10);

} // namespace pdelab
