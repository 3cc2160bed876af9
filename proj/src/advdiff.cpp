#include "pdelab/advdiff.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pdelab/moser.hpp"
#include "pdelab/navier_stokes.hpp"  // BlowUpError

namespace pdelab {

namespace {

inline double power_flux(double b, double u, double kappa) {
    // b |u|^k u, with |u|^0 = 1
    return b * (kappa == 0.0 ? u : std::pow(std::abs(u), kappa) * u);
}

inline double power_flux_speed(double b, double u, double kappa) {
    // d/du (b |u|^k u) = b (k+1) |u|^k for u-independent b
    return std::abs(b) * (kappa + 1.0) * (kappa == 0.0 ? 1.0 : std::pow(std::abs(u), kappa));
}

struct IndexHelper {
    int dim, n;
    std::size_t stride[3] = {0, 0, 0};
    explicit IndexHelper(const GridSpec& g) : dim(g.dim()), n(g.points()) {
        std::size_t s = 1;
        for (int d = dim - 1; d >= 0; --d) {
            stride[d] = s;
            s *= static_cast<std::size_t>(n);
        }
    }
    int pos(std::size_t idx, int d) const {
        return static_cast<int>((idx / stride[d]) % static_cast<std::size_t>(n));
    }
    std::size_t shift(std::size_t idx, int d, int delta) const {
        const int p = pos(idx, d);
        int q = p + delta;
        if (q >= n) q -= n;
        if (q < 0) q += n;
        return idx + (static_cast<std::size_t>(q) - static_cast<std::size_t>(p)) * stride[d];
    }
};

void minmax_b(const ProblemSpec& spec, const Field& u, double t, std::array<double, 3>& lo,
              std::array<double, 3>& hi) {
    const auto& g = u.grid();
    const auto& v = u.values();
    lo.fill(INFINITY);
    hi.fill(-INFINITY);
    ProblemSpec::Vec3 bx{};
    std::array<double, 3> x{};
    const IndexHelper ih(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (int d = 0; d < g.dim(); ++d) x[d] = g.coord(ih.pos(i, d));
        spec.b(x, t, v[i], bx);
        for (int d = 0; d < g.dim(); ++d) {
            if (!std::isfinite(bx[d]))
                throw std::invalid_argument("oscillation_b: b evaluated to NaN");
            lo[d] = std::min(lo[d], bx[d]);
            hi[d] = std::max(hi[d], bx[d]);
        }
    }
}

} // namespace

std::pair<std::array<double, 3>, double> oscillation_b(const ProblemSpec& spec, const Field& u,
                                                       double t) {
    u.require_finite("oscillation_b");
    std::array<double, 3> lo{}, hi{};
    minmax_b(spec, u, t, lo, hi);
    std::array<double, 3> half{0.0, 0.0, 0.0};
    double norm2 = 0.0;
    for (int d = 0; d < u.grid().dim(); ++d) {
        half[d] = 0.5 * (hi[d] - lo[d]);
        norm2 += half[d] * half[d];
    }
    return {half, std::sqrt(norm2)};
}

std::array<double, 3> midrange_b(const ProblemSpec& spec, const Field& u, double t) {
    std::array<double, 3> lo{}, hi{};
    minmax_b(spec, u, t, lo, hi);
    std::array<double, 3> mid{0.0, 0.0, 0.0};
    for (int d = 0; d < u.grid().dim(); ++d) mid[d] = 0.5 * (hi[d] + lo[d]);
    return mid;
}

void audit_coefficients(const ProblemSpec& spec, double t, double u_lo, double u_hi,
                        unsigned seed) {
    std::mt19937_64 rng(seed);
    const double L = spec.u0.grid().length();
    std::uniform_real_distribution<double> xdist(-L / 2.0, L / 2.0);
    std::uniform_real_distribution<double> udist(u_lo, u_hi);
    std::uniform_real_distribution<double> vdist(-1.0, 1.0);
    const double mu = spec.mu(t);
    ProblemSpec::Vec3 bx{};
    ProblemSpec::Mat3 ax{};
    for (int probe = 0; probe < 128; ++probe) {
        std::array<double, 3> x{};
        for (int d = 0; d < spec.dim; ++d) x[d] = xdist(rng);
        const double uu = udist(rng);
        spec.b(x, t, uu, bx);
        for (int d = 0; d < spec.dim; ++d)
            if (!std::isfinite(bx[d]))
                throw std::invalid_argument("audit_coefficients: b unbounded on probe set");
        spec.A(x, t, uu, ax);
        std::array<double, 3> v{};
        double v2 = 0.0;
        for (int d = 0; d < spec.dim; ++d) {
            v[d] = vdist(rng);
            v2 += v[d] * v[d];
        }
        double quad = 0.0;
        for (int i = 0; i < spec.dim; ++i)
            for (int j = 0; j < spec.dim; ++j) quad += v[i] * ax[i][j] * v[j];
        if (quad < mu * v2 * (1.0 - 1e-12))
            throw std::invalid_argument("audit_coefficients: ellipticity floor violated");
    }
}

AdvState::AdvState(const ProblemSpec& spec, std::vector<double> tracked_p)
    : spec_(&spec), u_(spec.u0), tracked_p_(std::move(tracked_p)) {
    if (!spec.b || !spec.A || !spec.mu)
        throw std::invalid_argument("AdvState: missing coefficients");
    u_.require_finite("AdvState");
    sup0_ = lp_norm(u_, INFINITY);
    // trackers below the integrability class of the datum are skipped
    std::erase_if(tracked_p_, [&](double p) { return p < spec.p0; });
    for (double p : tracked_p_) {
        u0_lp_[p] = lp_norm(u_, p);
        up_run_[p] = u0_lp_[p];
        trackers_.lp_series.emplace(p, NormSeries("L" + std::to_string(p)));
        trackers_.up_run_series.emplace(p, NormSeries("U" + std::to_string(p)));
    }
    mu_prev_ = spec.mu(0.0);
    update_running(0.0);
    record_sample();
}

double AdvState::initial_lp(double p) const {
    auto it = u0_lp_.find(p);
    if (it == u0_lp_.end()) throw std::invalid_argument("initial_lp: p not tracked");
    return it->second;
}

double AdvState::up_run(double p) const {
    auto it = up_run_.find(p);
    if (it == up_run_.end()) throw std::invalid_argument("up_run: p not tracked");
    return it->second;
}

void AdvState::track_q_power(double q) {
    if (q_power_.count(q)) return;
    NormSeries s("Lq_pow_" + std::to_string(q));
    s.append(t_, std::pow(lp_norm(u_, q), q));
    q_power_.emplace(q, std::move(s));
}

const NormSeries& AdvState::q_power_series(double q) const {
    auto it = q_power_.find(q);
    if (it == q_power_.end()) throw std::invalid_argument("q_power_series: q not tracked");
    return it->second;
}

double AdvState::stable_dt(double cfl) const {
    const auto& g = u_.grid();
    const auto& v = u_.values();
    const double dx = g.dx();
    const IndexHelper ih(g);
    ProblemSpec::Vec3 bx{}, fx0{}, fx1{};
    ProblemSpec::Mat3 ax{};
    std::array<double, 3> x{};
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (int d = 0; d < g.dim(); ++d) x[d] = g.coord(ih.pos(i, d));
        const double ui = v[i];
        spec_->b(x, t_, ui, bx);
        spec_->A(x, t_, ui, ax);
        double rate = 0.0;
        for (int d = 0; d < g.dim(); ++d) {
            double speed = power_flux_speed(bx[d], ui, spec_->kappa);
            if (spec_->f) {
                const double h = 1e-6 * (1.0 + std::abs(ui));
                spec_->f(t_, ui + h, fx1);
                spec_->f(t_, ui - h, fx0);
                speed += 1.25 * std::abs(fx1[d] - fx0[d]) / (2.0 * h);
            }
            rate += speed / dx + 2.0 * std::abs(ax[d][d]) / (dx * dx);
        }
        if (spec_->source) {
            const double h = 1e-6 * (1.0 + std::abs(ui));
            rate += std::abs(spec_->source(t_, ui + h) - spec_->source(t_, ui - h)) / (2.0 * h);
        }
        worst = std::max(worst, rate);
    }
    if (worst <= 0.0) return 1.0;
    return cfl / worst;
}

std::vector<double> AdvState::rhs(const std::vector<double>& v, double t) const {
    const auto& g = u_.grid();
    const double dx = g.dx();
    const std::size_t npts = g.size();
    const IndexHelper ih(g);
    std::vector<double> out(npts, 0.0);

    // centered gradients per axis, needed for off-diagonal diffusion only
    std::vector<std::vector<double>> cgrad;
    if (!spec_->a_diagonal) {
        cgrad.assign(g.dim(), std::vector<double>(npts));
        for (int c = 0; c < g.dim(); ++c)
            for (std::size_t i = 0; i < npts; ++i)
                cgrad[c][i] = (v[ih.shift(i, c, +1)] - v[ih.shift(i, c, -1)]) / (2.0 * dx);
    }

    ProblemSpec::Vec3 bx{}, tmp{}, fpl{}, fmr{};
    ProblemSpec::Mat3 ax{};
    std::array<double, 3> xf{};
    const double kappa = spec_->kappa;

    for (int d = 0; d < g.dim(); ++d) {
        for (std::size_t i = 0; i < npts; ++i) {
            const std::size_t ip = ih.shift(i, d, +1);
            const double uL = v[i], uR = v[ip];
            for (int c = 0; c < g.dim(); ++c) xf[c] = g.coord(ih.pos(i, c));
            xf[d] += 0.5 * dx;  // face center

            // b-part: local Lax-Friedrichs
            double flux;
            if (spec_->b_depends_on_u) {
                spec_->b(xf, t, uL, bx);
                const double gl = power_flux(bx[d], uL, kappa);
                const double sl = power_flux_speed(bx[d], uL, kappa);
                spec_->b(xf, t, uR, tmp);
                const double gr = power_flux(tmp[d], uR, kappa);
                const double sr = power_flux_speed(tmp[d], uR, kappa);
                spec_->b(xf, t, 0.5 * (uL + uR), tmp);
                const double sm = power_flux_speed(tmp[d], 0.5 * (uL + uR), kappa);
                const double alpha = 1.25 * std::max({sl, sr, sm});
                flux = 0.5 * (gl + gr) - 0.5 * alpha * (uR - uL);
            } else {
                spec_->b(xf, t, 0.5 * (uL + uR), bx);
                const double gl = power_flux(bx[d], uL, kappa);
                const double gr = power_flux(bx[d], uR, kappa);
                const double alpha = std::max(power_flux_speed(bx[d], uL, kappa),
                                              power_flux_speed(bx[d], uR, kappa));
                flux = 0.5 * (gl + gr) - 0.5 * alpha * (uR - uL);
            }

            // f-part: Engquist-Osher upwinding when the split is available
            if (spec_->f_plus && spec_->f_minus) {
                spec_->f_plus(t, uL, fpl);
                spec_->f_minus(t, uR, fmr);
                flux += fpl[d] + fmr[d];
            } else if (spec_->f) {
                spec_->f(t, uL, fpl);
                spec_->f(t, uR, fmr);
                const double h = 1e-6 * (1.0 + std::max(std::abs(uL), std::abs(uR)));
                ProblemSpec::Vec3 f1{}, f0{};
                const double um = 0.5 * (uL + uR);
                spec_->f(t, um + h, f1);
                spec_->f(t, um - h, f0);
                const double alpha_f = 1.25 * std::abs(f1[d] - f0[d]) / (2.0 * h);
                flux += 0.5 * (fpl[d] + fmr[d]) - 0.5 * alpha_f * (uR - uL);
            }

            // diffusive flux A grad u at the face
            const double uf = 0.5 * (uL + uR);
            spec_->A(xf, t, uf, ax);
            double dflux = ax[d][d] * (uR - uL) / dx;
            if (!spec_->a_diagonal)
                for (int c = 0; c < g.dim(); ++c) {
                    if (c == d) continue;
                    dflux += ax[d][c] * 0.5 * (cgrad[c][i] + cgrad[c][ip]);
                }

            const double total = (flux - dflux) / dx;
            out[i] -= total;
            out[ip] += total;
        }
    }

    if (spec_->source)
        for (std::size_t i = 0; i < npts; ++i) out[i] += spec_->source(t, v[i]);
    return out;
}

void AdvState::step(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("AdvState::step: dt must be positive");
    if (dt < spec_->dt_floor) throw BlowUpError(t_);
    const std::size_t npts = u_.size();
    const std::vector<double> un = u_.values();

    const std::vector<double> k1 = rhs(un, t_);
    std::vector<double> u1(npts);
    for (std::size_t i = 0; i < npts; ++i) u1[i] = un[i] + dt * k1[i];
    const std::vector<double> k2 = rhs(u1, t_ + dt);

    auto& v = u_.values();
    for (std::size_t i = 0; i < npts; ++i) v[i] = 0.5 * un[i] + 0.5 * (u1[i] + dt * k2[i]);
    t_ += dt;
    ++steps_;

    double sup = 0.0;
    for (double s : v) {
        if (!std::isfinite(s)) throw BlowUpError(t_);
        sup = std::max(sup, std::abs(s));
    }
    if (sup0_ > 0.0 && sup > spec_->sup_cap_factor * sup0_) throw BlowUpError(t_);
    update_running(dt);
}

void AdvState::update_running(double dt) {
    auto [bvec, b] = oscillation_b(*spec_, u_, t_);
    const double mu = spec_->mu(t_);
    if (!(mu > 0.0)) throw std::invalid_argument("AdvState: mu(t) must be positive");
    last_b_ = b;
    bmu_run_ = std::max(bmu_run_, b / mu);
    if (dt > 0.0) mu_integral_ += dt * 0.5 * (mu_prev_ + mu);
    mu_prev_ = mu;
    for (double p : tracked_p_)
        up_run_[p] = std::max(up_run_[p], lp_norm(u_, p));
    for (auto& [q, series] : q_power_)
        if (series.empty() || t_ > series.back_t())
            series.append(t_, std::pow(lp_norm(u_, q), q));
}

void AdvState::record_sample() {
    auto& tr = trackers_;
    if (!tr.b_series.empty() && t_ <= tr.b_series.back_t()) return;
    tr.b_series.append(t_, last_b_);
    tr.bmu_series.append(t_, bmu_run_);
    tr.sup_series.append(t_, lp_norm(u_, INFINITY));
    tr.mu_int_series.append(t_, mu_integral_);
    for (double p : tracked_p_) {
        tr.lp_series.at(p).append(t_, lp_norm(u_, p));
        tr.up_run_series.at(p).append(t_, up_run_[p]);
    }
    double mass = 0.0;
    for (double s : u_.values()) mass += s;
    tr.mass_samples.emplace_back(t_, mass * u_.grid().cell_volume());
}

// --- certificates -----------------------------------------------------------

BoundCertificate lp_growth_certificate(const AdvState& state, double p, double tol) {
    if (p < state.spec().p0)
        throw std::domain_error("lp_growth_certificate: p below the datum class p0");
    const auto& tr = state.trackers();
    auto it = tr.lp_series.find(p);
    if (it == tr.lp_series.end() || it->second.size() < 1)
        throw std::runtime_error("lp_growth_certificate: trackers not populated");

    const double kappa = state.spec().kappa;
    const double lp0 = state.initial_lp(p);
    BoundCertificate worst;
    bool first = true;
    for (std::size_t i = 0; i < it->second.size(); ++i) {
        const double lhs = it->second.value(i);
        const double bmu = tr.bmu_series.value(i);
        const double up = tr.up_run_series.at(p).value(i);
        const double mu_int = tr.mu_int_series.value(i);
        const double rhs = lp0 * std::exp(0.25 * (p - 1.0) * bmu * bmu *
                                          std::pow(up, 2.0 * kappa) * mu_int);
        auto cert = BoundCertificate::make("lp_growth_p" + std::to_string(p), lhs, rhs, 1.0, tol);
        if (first || cert.margin < worst.margin) worst = cert;
        first = false;
        if (!cert.pass) { worst = cert; break; }
    }
    return worst;
}

BoundCertificate linfty_bound_certificate(const AdvState& state, double p, double tol) {
    const int n = state.spec().dim;
    const double kappa = state.spec().kappa;
    if (!(p > n * kappa))
        throw std::domain_error("linfty_bound_certificate: requires p > n*kappa");
    if (p < state.spec().p0)
        throw std::domain_error("linfty_bound_certificate: p below the datum class p0");
    const auto& tr = state.trackers();
    const double constant = std::pow(2.0 * p, n / (p - n * kappa));
    const double sup0 = state.initial_sup();

    BoundCertificate worst;
    bool first = true;
    for (std::size_t i = 0; i < tr.sup_series.size(); ++i) {
        const double lhs = tr.sup_series.value(i);
        const double bmu = tr.bmu_series.value(i);
        const double up = tr.up_run_series.at(p).value(i);
        const double rhs = constant * std::max(sup0, std::pow(bmu, n / (p - n * kappa)) *
                                                         std::pow(up, p / (p - n * kappa)));
        auto cert =
            BoundCertificate::make("linfty_bound_p" + std::to_string(p), lhs, rhs, constant, tol);
        if (first || cert.margin < worst.margin) worst = cert;
        first = false;
        if (!cert.pass) { worst = cert; break; }
    }
    return worst;
}

EnergyAuditSample energy_audit_sample(const ProblemSpec& spec, const Field& u, double t,
                                      double q) {
    if (q < spec.p0 + 1.0)
        throw std::domain_error("energy_audit_sample: requires q >= p0 + 1");
    const auto& g = u.grid();
    const auto& v = u.values();
    const double dx = g.dx();
    const std::size_t npts = g.size();
    const IndexHelper ih(g);
    const auto beta = midrange_b(spec, u, t);

    double diss = 0.0, trans = 0.0;
    ProblemSpec::Vec3 bx{};
    ProblemSpec::Mat3 ax{};
    std::array<double, 3> x{}, grad{};
    for (std::size_t i = 0; i < npts; ++i) {
        for (int d = 0; d < g.dim(); ++d) {
            x[d] = g.coord(ih.pos(i, d));
            grad[d] = (v[ih.shift(i, d, +1)] - v[ih.shift(i, d, -1)]) / (2.0 * dx);
        }
        const double ui = v[i];
        const double wq = q == 2.0 ? 1.0 : std::pow(std::abs(ui), q - 2.0);
        spec.A(x, t, ui, ax);
        double quad = 0.0;
        for (int a = 0; a < g.dim(); ++a)
            for (int b = 0; b < g.dim(); ++b) quad += grad[a] * ax[a][b] * grad[b];
        diss += wq * quad;

        spec.b(x, t, ui, bx);
        double dot = 0.0;
        for (int d = 0; d < g.dim(); ++d) dot += (bx[d] - beta[d]) * grad[d];
        const double wt = std::pow(std::abs(ui), q - 2.0 + spec.kappa) * ui;
        trans += wt * dot;
    }
    const double vol = g.cell_volume();
    EnergyAuditSample s;
    s.t = t;
    s.dissipation = q * (q - 1.0) * diss * vol;
    s.transport = q * (q - 1.0) * trans * vol;
    return s;
}

BoundCertificate energy_identity_audit(const AdvState& state,
                                       const std::vector<EnergyAuditSample>& samples, double q,
                                       double tol) {
    if (samples.size() < 3)
        throw std::runtime_error("energy_identity_audit: insufficient history");
    const NormSeries& dense = state.q_power_series(q);

    auto dense_index = [&](double t) {
        for (std::size_t j = 0; j < dense.size(); ++j)
            if (dense.t(j) == t) return j;
        throw std::runtime_error("energy_identity_audit: sample time not in dense series");
    };

    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const std::size_t j = dense_index(samples[i].t);
        if (j == 0 || j + 1 >= dense.size()) continue;
        const double ddt =
            (dense.value(j + 1) - dense.value(j - 1)) / (dense.t(j + 1) - dense.t(j - 1));
        const double residual = ddt + samples[i].dissipation - samples[i].transport;
        const double scale = std::max({std::abs(ddt), std::abs(samples[i].dissipation),
                                       std::abs(samples[i].transport), 1e-30});
        worst = std::max(worst, std::abs(residual) / scale);
    }
    BoundCertificate cert;
    cert.name = "energy_identity_q" + std::to_string(q);
    cert.lhs = worst;
    cert.rhs = tol;
    cert.constant = 1.0;
    cert.margin = tol - worst;
    cert.ratio = worst / tol;
    cert.pass = worst < tol;
    return cert;
}

const char* to_string(ExistenceVerdict v) {
    switch (v) {
        case ExistenceVerdict::GlobalByI: return "global-by-(i)";
        case ExistenceVerdict::GlobalByII: return "global-by-(ii)";
        case ExistenceVerdict::GlobalByIII: return "global-by-(iii)";
        default: return "unknown";
    }
}

ExistenceVerdict global_existence_verdict(const ProblemSpec& spec) {
    const int n = spec.dim;
    const double kappa = spec.kappa;
    if (kappa < 1.0 / n - 1e-12) return ExistenceVerdict::GlobalByI;
    if (!spec.bmu_infty.has_value()) return ExistenceVerdict::Unknown;
    const double bmu = *spec.bmu_infty;
    const double mass = lp_norm(spec.u0, 1.0);
    if (std::abs(kappa - 1.0 / n) <= 1e-12) {
        if (mass <= std::pow(bmu, -static_cast<double>(n)) * (1.0 + 1e-12))
            return ExistenceVerdict::GlobalByII;
        return ExistenceVerdict::Unknown;
    }
    const double sup = lp_norm(spec.u0, INFINITY);
    const double lhs = mass * std::pow(sup, n * kappa - 1.0);
    const double rhs = std::pow(n * kappa * bmu, -static_cast<double>(n));
    if (lhs <= rhs * (1.0 + 1e-12)) return ExistenceVerdict::GlobalByIII;
    return ExistenceVerdict::Unknown;
}

// --- run driver -------------------------------------------------------------

AdvRunResult run_advdiff(const ProblemSpec& spec, const AdvRunConfig& config) {
    // probe ellipticity and boundedness over the datum's range before work
    const double sup0 = lp_norm(spec.u0, INFINITY);
    audit_coefficients(spec, 0.0, -sup0, sup0);

    std::vector<double> tracked = config.tracked_p;
    auto need = [&](double p) {
        if (p > 0.0 && std::find(tracked.begin(), tracked.end(), p) == tracked.end())
            tracked.push_back(p);
    };
    need(config.linfty_p);
    need(config.lp_growth_p);
    for (double q : config.moser_q) {
        need(q);
        need(q / 2.0);
    }

    AdvState state(spec, tracked);
    for (double q : config.audit_q) state.track_q_power(q);
    for (double q : config.moser_q) state.track_q_power(q);

    std::map<double, std::vector<EnergyAuditSample>> audits;
    struct MoserSample { double t, lq, lq_half, b, mu; };
    std::map<double, std::vector<MoserSample>> moser_rows;

    AdvRunResult result;
    result.max_sup = state.initial_sup();

    auto take_samples = [&]() {
        state.record_sample();
        for (double q : config.audit_q)
            audits[q].push_back(energy_audit_sample(spec, state.u(), state.t(), q));
        for (double q : config.moser_q)
            moser_rows[q].push_back({state.t(), lp_norm(state.u(), q),
                                     lp_norm(state.u(), q / 2.0), state.current_b(),
                                     spec.mu(state.t())});
    };
    for (double q : config.audit_q)
        audits[q].push_back(energy_audit_sample(spec, state.u(), 0.0, q));
    for (double q : config.moser_q)
        moser_rows[q].push_back({0.0, lp_norm(state.u(), q), lp_norm(state.u(), q / 2.0),
                                 state.current_b(), spec.mu(0.0)});

    long since_sample = 0;
    try {
        while (state.t() < config.t_final && state.steps() < config.max_steps) {
            double dt = state.stable_dt(config.cfl);
            dt = std::min(dt, config.t_final - state.t());
            state.step(dt);
            result.max_sup = std::max(result.max_sup, lp_norm(state.u(), INFINITY));
            if (++since_sample >= config.sample_stride || state.t() >= config.t_final) {
                take_samples();
                since_sample = 0;
            }
        }
        result.outcome = RunOutcome::Completed;
    } catch (const BlowUpError& e) {
        result.outcome = RunOutcome::BlewUp;
        result.blow_up_time = e.t;
    }
    result.end_time = state.t();
    result.steps = state.steps();

    if (result.outcome == RunOutcome::Completed) {
        if (config.lp_growth_p > 0.0)
            result.certificates.push_back(
                lp_growth_certificate(state, config.lp_growth_p));
        if (config.linfty_p > 0.0)
            result.certificates.push_back(
                linfty_bound_certificate(state, config.linfty_p));
        for (double q : config.audit_q)
            result.certificates.push_back(
                energy_identity_audit(state, audits[q], q, config.audit_tol));
        for (double q : config.moser_q) {
            IterationParams pr(spec.dim, spec.kappa, std::max(spec.p0, q / 2.0));
            const NormSeries& dense = state.q_power_series(q);
            BoundCertificate summary;
            summary.name = "moser_3_13_q" + std::to_string(q);
            summary.pass = true;
            summary.margin = INFINITY;
            for (const auto& row : moser_rows[q]) {
                // derivative sign from the dense series
                double ddt = -1.0;
                for (std::size_t j = 1; j + 1 < dense.size(); ++j)
                    if (dense.t(j) == row.t) {
                        ddt = (dense.value(j + 1) - dense.value(j - 1)) /
                              (dense.t(j + 1) - dense.t(j - 1));
                        break;
                    }
                StepSample sample{q, ddt, row.lq, row.lq_half, row.b, row.mu};
                auto cert = step_certificate_3_13(pr, sample, config.moser_tol);
                if (!cert.indeterminate && cert.margin < summary.margin) {
                    summary.lhs = cert.lhs;
                    summary.rhs = cert.rhs;
                    summary.margin = cert.margin;
                    summary.ratio = cert.ratio;
                }
                summary.pass = summary.pass && cert.pass;
            }
            if (summary.margin == INFINITY) {
                summary.indeterminate = true;  // every sample inert
                summary.margin = 0.0;
            }
            result.certificates.push_back(summary);
        }
    }
    result.trackers = state.trackers();
    return result;
}

FujitaSummary fujita_contrast_run(int dim, double kappa, double amplitude, FujitaMode mode,
                                  double horizon, int cells, double box) {
    if (!(amplitude >= 0.0)) throw std::invalid_argument("fujita_contrast_run: amplitude >= 0");
    GridSpec grid(dim, cells, box);
    ProblemSpec spec;
    spec.dim = dim;
    spec.kappa = kappa;
    spec.u0 = Field::from_function(grid, 1, [&](const std::array<double, 3>& x, int) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
        return amplitude * std::exp(-r2 / 2.0);
    });
    spec.A = [](const ProblemSpec::Vec3&, double, double, ProblemSpec::Mat3& out) {
        out = {};
        for (int d = 0; d < 3; ++d) out[d][d] = 1.0;
    };
    spec.mu = [](double) { return 1.0; };

    if (mode == FujitaMode::Reaction) {
        spec.b = [](const ProblemSpec::Vec3&, double, double, ProblemSpec::Vec3& out) {
            out = {0.0, 0.0, 0.0};
        };
        spec.source = [kappa](double, double u) {
            return (kappa == 0.0 ? u : std::pow(std::abs(u), kappa) * u);
        };
    } else {
        // compressive advection field: div b < 0 on part of the box
        const double two_pi_over_l = 2.0 * M_PI / box;
        spec.b = [two_pi_over_l, dim](const ProblemSpec::Vec3& x, double, double,
                                      ProblemSpec::Vec3& out) {
            out = {0.0, 0.0, 0.0};
            for (int d = 0; d < dim; ++d) out[d] = std::sin(two_pi_over_l * x[d]);
        };
    }

    AdvRunConfig config;
    config.t_final = horizon;
    config.tracked_p = {1.0};
    config.sample_stride = 50;
    auto run = run_advdiff(spec, config);

    FujitaSummary summary;
    summary.outcome = run.outcome;
    summary.blow_up_time = run.blow_up_time;
    summary.max_sup = run.max_sup;
    summary.horizon = horizon;
    return summary;
}

} // namespace pdelab
