#include "pdelab/navier_stokes.hpp"

#include <cmath>
#include <random>

#include "pdelab/constants.hpp"
#include "pdelab/heat.hpp"

namespace pdelab {

Field leray_project(const Field& v) {
    v.require_finite("leray_project");
    const auto& g = v.grid();
    if (v.components() != g.dim())
        throw std::invalid_argument("leray_project: needs a dim-component field");
    Field out = v;
    auto& sp = out.spectral_mut();
    const std::size_t npts = g.size();
    const int n = g.dim();
    for (std::size_t i = 0; i < npts; ++i) {
        const auto idx = g.unflatten(i);
        double k[3] = {0, 0, 0};
        double k2 = 0.0;
        for (int d = 0; d < n; ++d) {
            k[d] = g.wavenumber(idx[d]);
            k2 += k[d] * k[d];
        }
        if (k2 == 0.0) continue;  // mean flow untouched
        cplx kdotu(0.0, 0.0);
        for (int d = 0; d < n; ++d) kdotu += k[d] * sp[d * npts + i];
        for (int d = 0; d < n; ++d) sp[d * npts + i] -= k[d] * kdotu / k2;
    }
    return out;
}

Field nonlinear_term(const Field& u) {
    const auto& g = u.grid();
    const int n = g.dim();
    const std::size_t npts = g.size();

    // u . grad u in convection form, products in physical space.
    std::vector<Field> dfields;  // dfields[j] = d/dx_j of every component
    dfields.reserve(n);
    for (int j = 0; j < n; ++j) dfields.push_back(derivative(u, j));
    const auto& uv = u.values();

    Field adv(g, n);
    auto& av = adv.values();
    for (int i = 0; i < n; ++i) {
        double* dst = av.data() + i * npts;
        for (int j = 0; j < n; ++j) {
            const auto& dj = dfields[j].values();
            const double* uj = uv.data() + j * npts;
            const double* dui = dj.data() + i * npts;
            if (j == 0)
                for (std::size_t p = 0; p < npts; ++p) dst[p] = uj[p] * dui[p];
            else
                for (std::size_t p = 0; p < npts; ++p) dst[p] += uj[p] * dui[p];
        }
    }
    dealias(adv);
    auto& sp = adv.spectral_mut();
    for (auto& c : sp) c = -c;
    return leray_project(adv);
}

NSState::NSState(Field u0, double nu, int m_max, double cfl_limit)
    : u_(std::move(u0)), nu_(nu), m_max_(m_max), cfl_limit_(cfl_limit) {
    if (!(nu > 0.0)) throw std::invalid_argument("NSState: nu must be positive");
    if (m_max < 1 || m_max > max_derivative_order)
        throw std::invalid_argument("NSState: m_max out of range");
    u_.require_finite("NSState");
    dealias(u_);
    u_ = leray_project(u_);
    history_.dm_l2.resize(m_max_);
    record();
}

void NSState::record() {
    history_.t.push_back(t_);
    history_.l2.push_back(lp_norm(u_, 2.0));
    const double du = hdot_norm(u_, 1.0);
    history_.du_l2.push_back(du);
    for (int m = 1; m <= m_max_; ++m) history_.dm_l2[m - 1].push_back(hdot_norm(u_, m));
    if (history_.diss.empty()) {
        history_.diss.push_back(0.0);
    } else {
        const std::size_t k = history_.du_l2.size();
        const double dt = history_.t[k - 1] - history_.t[k - 2];
        const double a = history_.du_l2[k - 2], b = history_.du_l2[k - 1];
        history_.diss.push_back(history_.diss.back() + nu_ * dt * (a * a + b * b));
    }
}

void NSState::step(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("NSState::step: dt must be positive");
    const double umax = lp_norm(u_, INFINITY);
    const double dx = u_.grid().dx();
    if (umax > 0.0 && dt > cfl_limit_ * dx / umax)
        throw CflError(0.5 * cfl_limit_ * dx / umax);

    const auto& g = u_.grid();
    const std::size_t total = u_.spectral().size();
    const std::size_t npts = g.size();
    const int n = g.dim();

    // Integrating-factor RK4: E = exp(-nu |k|^2 dt/2) applied analytically.
    std::vector<double> ehalf(npts);
    for (std::size_t i = 0; i < npts; ++i)
        ehalf[i] = std::exp(-0.5 * nu_ * g.k_squared(i) * dt);

    auto apply_E = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
        out.resize(total);
        for (int c = 0; c < n; ++c)
            for (std::size_t i = 0; i < npts; ++i)
                out[c * npts + i] = in[c * npts + i] * ehalf[i];
    };
    auto nonlin = [&](const std::vector<cplx>& coeff) {
        Field f(g, n);
        f.spectral_mut() = coeff;
        return nonlinear_term(f).spectral();
    };

    const std::vector<cplx> v0 = u_.spectral();
    std::vector<cplx> a = nonlin(v0);

    std::vector<cplx> tmp(total), ev0(total);
    apply_E(v0, ev0);

    for (std::size_t i = 0; i < total; ++i) tmp[i] = v0[i] + 0.5 * dt * a[i];
    std::vector<cplx> etmp(total);
    apply_E(tmp, etmp);
    std::vector<cplx> b = nonlin(etmp);

    for (std::size_t i = 0; i < total; ++i) tmp[i] = ev0[i] + 0.5 * dt * b[i];
    std::vector<cplx> c = nonlin(tmp);

    std::vector<cplx> ec(total);
    apply_E(c, ec);
    std::vector<cplx> e2v0(total);
    apply_E(ev0, e2v0);
    for (std::size_t i = 0; i < total; ++i) tmp[i] = e2v0[i] + dt * ec[i];
    std::vector<cplx> d = nonlin(tmp);

    std::vector<cplx> ea(total), ebc(total);
    apply_E(a, ea);
    std::vector<cplx> e2a(total);
    apply_E(ea, e2a);
    for (std::size_t i = 0; i < total; ++i) ebc[i] = b[i] + c[i];
    std::vector<cplx> eb_c(total);
    apply_E(ebc, eb_c);

    auto& sp = u_.spectral_mut();
    for (std::size_t i = 0; i < total; ++i)
        sp[i] = e2v0[i] + dt / 6.0 * (e2a[i] + 2.0 * eb_c[i] + d[i]);

    t_ += dt;
    if (!u_.finite()) throw BlowUpError(t_);
    record();
}

double NSState::max_divergence() const {
    const auto& g = u_.grid();
    const auto& sp = u_.spectral();
    const std::size_t npts = g.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
        const auto idx = g.unflatten(i);
        cplx div(0.0, 0.0);
        for (int d = 0; d < g.dim(); ++d)
            div += g.wavenumber(idx[d]) * sp[d * npts + i];
        worst = std::max(worst, std::abs(div));
    }
    return worst;
}

BoundCertificate energy_certificate(const NSState& state, double tol) {
    const auto& h = state.history();
    if (h.t.size() < 1) throw std::runtime_error("energy_certificate: insufficient data");
    const double l2t = h.l2.back();
    const double lhs = l2t * l2t + h.diss.back();
    const double rhs = h.l2.front() * h.l2.front();
    return BoundCertificate::make("energy_inequality", lhs, rhs, 1.0, tol);
}

double energy_residual(const NSState& state, std::size_t i) {
    const auto& h = state.history();
    const double e0 = h.l2.front() * h.l2.front();
    return (h.l2[i] * h.l2[i] + h.diss[i] - e0) / e0;
}

BoundCertificate q_estimate_certificate(const Field& u_at_s, double nu, double s, double t,
                                        double tol) {
    if (u_at_s.grid().dim() != 3)
        throw std::domain_error("q_estimate_certificate: three dimensions only");
    if (!(t > s)) throw std::domain_error("q_estimate_certificate: need t > s");
    const Field q = nonlinear_term(u_at_s);
    const double lhs = lp_norm(apply_semigroup(q, nu, t - s), 2.0);
    const double rhs = constants::k_q_smoothing * std::pow(nu, -0.75) *
                       std::pow(t - s, -0.75) * lp_norm(u_at_s, 2.0) * hdot_norm(u_at_s, 1.0);
    return BoundCertificate::make("q_estimate", lhs, rhs, constants::k_q_smoothing, tol);
}

BoundCertificate q_estimate_certificate(const NSState& state, double s, double t, double tol) {
    if (std::abs(s - state.t()) > 1e-12)
        throw std::invalid_argument("q_estimate_certificate: state is not at time s");
    return q_estimate_certificate(state.u(), state.nu(), s, t, tol);
}

std::pair<double, double> decay_monitor_sample(const NSState& state, const LerayCheckpoint& cp,
                                               int m) {
    if (m > state.m_max()) throw std::domain_error("decay_monitor: m above m_max");
    if (!(state.t() > cp.t0)) throw std::domain_error("decay_monitor: need t > t0");
    const int n = state.u().grid().dim();
    const double t = state.t();
    const double w1 = std::pow(t, 0.5 * m) * hdot_norm(state.u(), m);

    Field err = state.u();
    const Field flow = apply_semigroup(cp.u_at_t0, state.nu(), t - cp.t0);
    auto& sp = err.spectral_mut();
    const auto& fs = flow.spectral();
    for (std::size_t i = 0; i < sp.size(); ++i) sp[i] -= fs[i];
    const double w2 = std::pow(t, 0.25 * (n - 2) + 0.5 * m) * hdot_norm(err, m);
    return {w1, w2};
}

std::optional<double> gradient_monotonicity_onset(const NSState& state) {
    const auto& h = state.history();
    const std::size_t n = h.du_l2.size();
    if (n < 2) return h.t.empty() ? std::optional<double>{} : std::optional<double>{h.t[0]};
    // earliest index from which the series never increases (1e-9 relative
    // slack for step noise)
    std::size_t onset = n - 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        if (h.du_l2[i + 1] <= h.du_l2[i] * (1.0 + 1e-9))
            onset = i;
        else
            break;
    }
    if (onset == n - 1) return std::nullopt;
    return h.t[onset];
}

double tstar_bound(double nu, double u0_l2) {
    if (!(nu > 0.0)) throw std::domain_error("tstar_bound: nu must be positive");
    const double k3 = constants::k_gn3;
    const double coef = 0.5 * std::pow(k3, 12);
    return coef * std::pow(nu, -5.0) * std::pow(u0_l2, 4.0);
}

BoundCertificate trilinear_certificate(const Field& u, double tol) {
    const auto& g = u.grid();
    if (g.dim() != 3) throw std::domain_error("trilinear_certificate: three dimensions only");
    const int n = 3;
    const std::size_t npts = g.size();

    // |D_l u_i| on the grid for all nine first derivatives
    std::vector<std::vector<double>> d(n * n);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            std::array<int, 3> alpha{0, 0, 0};
            alpha[l] = 1;
            Field df = spectral_derivative(u, alpha);
            const auto& v = df.values();
            d[i * n + l].assign(v.begin() + i * npts, v.begin() + (i + 1) * npts);
        }

    double acc = 0.0;
    for (std::size_t p = 0; p < npts; ++p) {
        double cell = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l)
                    cell += std::abs(d[i * n + l][p]) * std::abs(d[j * n + l][p]) *
                            std::abs(d[i * n + j][p]);
        acc += cell;
    }
    const double lhs = acc * g.cell_volume();
    const double k3 = constants::k_gn3;
    const double rhs = std::pow(k3, 3) * std::pow(hdot_norm(u, 1.0), 1.5) *
                       std::pow(hdot_norm(u, 2.0), 1.5);
    return BoundCertificate::make("trilinear_a1", lhs, rhs, std::pow(k3, 3), tol);
}

Field taylor_green_2d(const GridSpec& grid, double amplitude) {
    if (grid.dim() != 2) throw std::invalid_argument("taylor_green_2d: dim must be 2");
    const double k = 2.0 * M_PI / grid.length();
    return Field::from_function(grid, 2, [=](const std::array<double, 3>& x, int c) {
        if (c == 0) return amplitude * std::sin(k * x[0]) * std::cos(k * x[1]);
        return -amplitude * std::cos(k * x[0]) * std::sin(k * x[1]);
    });
}

Field random_divfree_field(const GridSpec& grid, unsigned seed, double l2_target, int max_freq) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::uniform_int_distribution<int> freq(-max_freq, max_freq);
    const int n = grid.dim();
    struct Mode { double a, ph; int f[3]; };
    std::vector<std::vector<Mode>> modes(n);
    for (int c = 0; c < n; ++c)
        for (int m = 0; m < 8; ++m) {
            Mode mo{amp(rng), phase(rng), {0, 0, 0}};
            bool nonzero = false;
            for (int d = 0; d < n; ++d) {
                mo.f[d] = freq(rng);
                nonzero |= mo.f[d] != 0;
            }
            if (!nonzero) mo.f[0] = 1;
            modes[c].push_back(mo);
        }
    const double L = grid.length();
    Field raw = Field::from_function(grid, n, [&](const std::array<double, 3>& x, int c) {
        double v = 0.0;
        for (const auto& m : modes[c]) {
            double arg = m.ph;
            for (int d = 0; d < n; ++d) arg += 2.0 * M_PI * m.f[d] * x[d] / L;
            v += m.a * std::cos(arg);
        }
        return v;
    });
    Field projected = leray_project(raw);
    dealias(projected);
    const double l2 = lp_norm(projected, 2.0);
    if (l2 > 0.0) {
        auto& sp = projected.spectral_mut();
        for (auto& cval : sp) cval *= l2_target / l2;
    }
    return projected;
}

} // namespace pdelab
