#include "pdelab/heat.hpp"

#include <cmath>

namespace pdelab {

Field apply_semigroup(const Field& field, double nu, double tau) {
    if (tau < 0.0) throw std::domain_error("apply_semigroup: tau must be >= 0");
    if (tau == 0.0) return field;
    Field out = field;
    auto& sp = out.spectral_mut();
    const auto& g = field.grid();
    const std::size_t npts = g.size();
    const int nc = field.components();
    for (std::size_t i = 0; i < npts; ++i) {
        const double damp = std::exp(-nu * g.k_squared(i) * tau);
        for (int c = 0; c < nc; ++c) sp[c * npts + i] *= damp;
    }
    return out;
}

BoundCertificate smoothing_certificate(const Field& u, double nu, double tau,
                                       const std::array<int, 3>& alpha, double r,
                                       double constant, double tol) {
    if (!(r >= 1.0 && r <= 2.0)) throw std::domain_error("smoothing_certificate: r in [1,2]");
    if (!(tau > 0.0)) throw std::domain_error("smoothing_certificate: tau > 0");
    const int n = u.grid().dim();
    int m = 0;
    for (int d = 0; d < 3; ++d) m += alpha[d];

    const Field smoothed = spectral_derivative(apply_semigroup(u, nu, tau), alpha);
    const double lhs = lp_norm(smoothed, 2.0);
    const double gamma = 0.5 * n * (1.0 / r - 0.5) + 0.5 * m;
    const double base = lp_norm(u, r) * std::pow(nu * tau, -gamma);
    return BoundCertificate::make("heat_smoothing", lhs, constant * base, constant, tol);
}

NormSeries heat_decay_series(const Field& u0, double nu, const std::vector<double>& times,
                             const DecaySeriesSpec& spec) {
    u0.require_finite("heat_decay_series");
    const int n = u0.grid().dim();
    NormSeries series(spec.kind == DecayWeight::SupNorm
                          ? "heat_decay_sup"
                          : "heat_decay_Hdot_" + std::to_string(spec.s));
    double prev = 0.0;
    bool first = true;
    for (double t : times) {
        if (!(t > 0.0) || (!first && t <= prev))
            throw std::invalid_argument("heat_decay_series: times must be positive increasing");
        prev = t;
        first = false;
        const Field v = apply_semigroup(u0, nu, t);
        double w;
        if (spec.kind == DecayWeight::SupNorm)
            w = std::pow(t, 0.25 * n) * lp_norm(v, INFINITY);
        else
            w = std::pow(t, 0.5 * spec.s) * hdot_norm(v, spec.s);
        series.append(t, w);
    }
    return series;
}

std::vector<double> geometric_times(double t0, double t1, int per_decade) {
    if (!(t0 > 0.0 && t1 > t0)) throw std::invalid_argument("geometric_times: need 0 < t0 < t1");
    const double decades = std::log10(t1 / t0);
    const int count = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = t0 * std::pow(t1 / t0, static_cast<double>(i) / (count - 1));
    out.back() = t1;
    return out;
}

} // namespace pdelab
