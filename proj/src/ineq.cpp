#include "pdelab/ineq.hpp"

#include <cmath>
#include <random>

namespace pdelab {

double AnalyticSample::eval(const std::array<double, 3>& x, int dim) const {
    double v = 0.0;
    for (const auto& b : bumps) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            const double dx = x[d] - b.center[d];
            r2 += dx * dx;
        }
        v += b.amp * std::exp(-r2 / (2.0 * b.sigma * b.sigma));
    }
    if (!modes.empty()) {
        double w = 1.0;
        if (window_sigma > 0.0) {
            double r2 = 0.0;
            for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
            w = std::exp(-r2 / (2.0 * window_sigma * window_sigma));
        }
        double trig = 0.0;
        for (const auto& m : modes) {
            double arg = m.phase;
            for (int d = 0; d < dim; ++d) arg += m.freq[d] * x[d];
            trig += m.amp * std::cos(arg);
        }
        v += w * trig;
    }
    return v;
}

AnalyticSample AnalyticSample::dilated(double lambda) const {
    AnalyticSample out = *this;
    for (auto& b : out.bumps) {
        for (auto& c : b.center) c /= lambda;
        b.sigma /= lambda;
    }
    for (auto& m : out.modes)
        for (auto& f : m.freq) f *= lambda;
    if (out.window_sigma > 0.0) out.window_sigma /= lambda;
    return out;
}

AnalyticSample AnalyticSample::scaled(double c) const {
    AnalyticSample out = *this;
    for (auto& b : out.bumps) b.amp *= c;
    for (auto& m : out.modes) m.amp *= c;
    return out;
}

Field AnalyticSample::materialize(const GridSpec& grid) const {
    return Field::from_function(grid, 1, [this, &grid](const std::array<double, 3>& x, int) {
        return eval(x, grid.dim());
    });
}

namespace {

double grad_l2(const Field& f) { return hdot_norm(f, 1.0); }

double boundary_peak(const Field& f) {
    const auto& g = f.grid();
    const auto& v = f.values();
    const int n = g.points();
    double peak = 0.0;
    const std::size_t npts = g.size();
    for (std::size_t i = 0; i < npts; ++i) {
        const auto idx = g.unflatten(i);
        bool on_boundary = false;
        for (int d = 0; d < g.dim(); ++d)
            if (idx[d] == 0 || idx[d] == n - 1) { on_boundary = true; break; }
        if (!on_boundary) continue;
        for (int c = 0; c < f.components(); ++c)
            peak = std::max(peak, std::abs(v[c * npts + i]));
    }
    return peak;
}

} // namespace

InequalitySpec make_nash(int n, double k_nash) {
    return {"nash_" + std::to_string(n) + "d", n, k_nash, 1e-3,
            [n](const Field& f) {
                const double rhs = std::pow(lp_norm(f, 1.0), 2.0 / (n + 2.0)) *
                                   std::pow(grad_l2(f), n / (n + 2.0));
                return std::make_pair(lp_norm(f, 2.0), rhs);
            }};
}

InequalitySpec make_gn_sup_d2() {
    return {"gn_sup_d2", 3, 0.678, 1e-3, [](const Field& f) {
                const double rhs =
                    std::pow(lp_norm(f, 2.0), 0.25) * std::pow(dm_l2_norm(f, 2), 0.75);
                return std::make_pair(lp_norm(f, INFINITY), rhs);
            }};
}

InequalitySpec make_gn_d1() {
    return {"gn_d1", 3, 1.0, 1e-3, [](const Field& f) {
                const double rhs =
                    std::sqrt(lp_norm(f, 2.0)) * std::sqrt(dm_l2_norm(f, 2));
                return std::make_pair(grad_l2(f), rhs);
            }};
}

InequalitySpec make_gn_combined() {
    const double k2 = 0.678 * std::sqrt(1.0);
    return {"gn_combined", 3, k2, 1e-3, [](const Field& f) {
                const double lhs = lp_norm(f, INFINITY) * std::sqrt(grad_l2(f));
                const double rhs = std::sqrt(lp_norm(f, 2.0)) * dm_l2_norm(f, 2);
                return std::make_pair(lhs, rhs);
            }};
}

InequalitySpec make_gn_l1_family(int n, double r) {
    if (!(r >= 2.0 && r < 2.0 + 2.0 / n))
        throw std::invalid_argument("make_gn_l1_family: r in [2, 2+2/n)");
    const double theta = (1.0 - 1.0 / r) / (0.5 + 1.0 / n);
    return {"gn_l1_r" + std::to_string(r).substr(0, 4) + "_" + std::to_string(n) + "d", n, 1.0,
            1e-3, [r, theta](const Field& f) {
                const double rhs =
                    std::pow(lp_norm(f, 1.0), 1.0 - theta) * std::pow(grad_l2(f), theta);
                return std::make_pair(lp_norm(f, r), rhs);
            }};
}

InequalitySpec make_gn_l4(double constant) {
    return {"gn_l4", 3, constant, 1e-3, [](const Field& f) {
                const double rhs =
                    std::pow(lp_norm(f, 2.0), 0.25) * std::pow(grad_l2(f), 0.75);
                return std::make_pair(lp_norm(f, 4.0), rhs);
            }};
}

InequalitySpec make_gn_l3() {
    return {"gn_l3", 3, 0.581862001307, 1e-3, [](const Field& f) {
                const double rhs = std::sqrt(lp_norm(f, 2.0)) * std::sqrt(grad_l2(f));
                return std::make_pair(lp_norm(f, 3.0), rhs);
            }};
}

BoundCertificate audit(const InequalitySpec& ineq, const Field& field) {
    const double peak = lp_norm(field, INFINITY);
    if (peak > 0.0 && boundary_peak(field) > 1e-10 * peak)
        throw RejectedSampleError(ineq.name + ": boundary-significant tails");
    auto [lhs, rhs] = ineq.evaluate(field);
    return BoundCertificate::make(ineq.name, lhs, ineq.constant * rhs, ineq.constant, ineq.tol);
}

AnalyticSample corpus_sample(const CorpusSpec& corpus, int index) {
    // Independent stream per sample so corpora are stable under reordering.
    std::mt19937_64 rng(corpus.seed * 0x9e3779b97f4a7c15ull + index);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double L = corpus.grid.length();
    const int dim = corpus.grid.dim();
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    std::uniform_real_distribution<double> center(-L / 10.0, L / 10.0);
    std::uniform_real_distribution<double> sigma(L / 30.0, L / 20.0);

    AnalyticSample s;
    const double kind = unit(rng);
    if (kind < 0.5) {
        // multi-bump Gaussian mixture
        const int nb = 1 + static_cast<int>(unit(rng) * 3.0);
        for (int b = 0; b < nb; ++b) {
            AnalyticSample::Bump bump{};
            bump.amp = amp(rng);
            for (int d = 0; d < dim; ++d) bump.center[d] = center(rng);
            bump.sigma = sigma(rng);
            s.bumps.push_back(bump);
        }
        if (s.bumps.size() == 1 && std::abs(s.bumps[0].amp) < 0.1) s.bumps[0].amp = 0.5;
    } else {
        // windowed band-limited field
        s.window_sigma = sigma(rng);
        const int nm = 2 + static_cast<int>(unit(rng) * 4.0);
        std::uniform_real_distribution<double> freq(-3.0 / s.window_sigma, 3.0 / s.window_sigma);
        for (int m = 0; m < nm; ++m) {
            AnalyticSample::Mode mode{};
            mode.amp = amp(rng);
            for (int d = 0; d < dim; ++d) mode.freq[d] = freq(rng);
            mode.phase = unit(rng) * 2.0 * M_PI;
            s.modes.push_back(mode);
        }
    }
    return s;
}

CorpusSummary corpus_audit(const InequalitySpec& ineq, const CorpusSpec& corpus, int count) {
    if (count < 1) throw std::domain_error("corpus_audit: count >= 1");
    CorpusSummary summary;
    summary.count = count;
    for (int i = 0; i < count; ++i) {
        const Field f = corpus_sample(corpus, i).materialize(corpus.grid);
        try {
            const auto cert = audit(ineq, f);
            if (cert.pass)
                ++summary.passes;
            else
                summary.failures.push_back(ineq.name + " sample " + std::to_string(i));
            summary.max_ratio = std::max(summary.max_ratio, cert.ratio);
        } catch (const RejectedSampleError&) {
            ++summary.rejected;
        }
    }
    if (summary.rejected == count) throw std::runtime_error("corpus_audit: empty corpus");
    return summary;
}

BoundCertificate scaling_audit(const InequalitySpec& ineq, const GridSpec& grid,
                               const AnalyticSample& sample) {
    auto ratio_of = [&](const AnalyticSample& s) {
        auto [lhs, rhs] = ineq.evaluate(s.materialize(grid));
        return lhs / rhs;
    };
    const double base = ratio_of(sample);
    const double amp2 = ratio_of(sample.scaled(2.0));
    const double dil2 = ratio_of(sample.dilated(2.0));

    BoundCertificate cert;
    cert.name = ineq.name + "_scaling";
    cert.lhs = std::max(std::abs(amp2 - base), std::abs(dil2 - base)) / base;
    cert.rhs = 1e-8;
    cert.constant = 1.0;
    cert.margin = cert.rhs - cert.lhs;
    cert.ratio = base;
    cert.pass = std::abs(amp2 - base) <= 1e-12 * base && std::abs(dil2 - base) <= 1e-8 * base;
    return cert;
}

} // namespace pdelab
