#include "pdelab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <mutex>

namespace pdelab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// FFTW plans are reused per (dim, N); execution goes through the new-array
// interface on fftw-aligned buffers so one plan serves all threads.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plan_for(int dim, int n) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(dim, n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(n);
    fftw_complex* buf = fftw_alloc_complex(total);
    int dims[3] = {n, n, n};
    PlanPair p;
    p.fwd = fftw_plan_dft(dim, dims, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft(dim, dims, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    return cache.emplace(key, p).first->second;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

} // namespace

GridSpec::GridSpec(int dim, int points, double length)
    : dim_(dim), points_(points), length_(length) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("GridSpec: dim must be 1..3");
    if (points < 8 || !is_power_of_two(points))
        throw std::invalid_argument("GridSpec: N must be a power of two >= 8");
    if (!(length > 0.0)) throw std::invalid_argument("GridSpec: L must be positive");
    size_ = 1;
    for (int d = 0; d < dim_; ++d) size_ *= static_cast<std::size_t>(points_);
    cell_volume_ = std::pow(length_ / points_, dim_);
    k_table_.resize(points_);
    for (int m = 0; m < points_; ++m)
        k_table_[m] = 2.0 * M_PI * frequency(m) / length_;
}

double GridSpec::k_squared(std::size_t idx) const {
    double s = 0.0;
    std::size_t rem = idx;
    for (int d = dim_ - 1; d >= 0; --d) {
        const int m = static_cast<int>(rem % points_);
        rem /= points_;
        const double k = k_table_[m];
        s += k * k;
    }
    return s;
}

std::array<int, 3> GridSpec::unflatten(std::size_t idx) const {
    std::array<int, 3> out{0, 0, 0};
    for (int d = dim_ - 1; d >= 0; --d) {
        out[d] = static_cast<int>(idx % points_);
        idx /= points_;
    }
    return out;
}

Field::Field(GridSpec grid, int components) : grid_(grid), components_(components) {
    if (components != 1 && components != grid.dim())
        throw std::invalid_argument("Field: components must be 1 or dim");
    phys_.assign(components_ * grid_.size(), 0.0);
    spec_.assign(components_ * grid_.size(), cplx(0.0, 0.0));
    phys_valid_ = true;
    spec_valid_ = true;  // zero field is consistent in both views
}

Field Field::from_function(
    const GridSpec& grid, int components,
    const std::function<double(const std::array<double, 3>&, int)>& f) {
    Field out(grid, components);
    auto& v = out.values();
    const int n = grid.points();
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int c = 0; c < components; ++c) {
        std::size_t idx = 0;
        const std::size_t base = c * grid.size();
        if (grid.dim() == 1) {
            for (int i = 0; i < n; ++i) {
                x[0] = grid.coord(i);
                v[base + idx++] = f(x, c);
            }
        } else if (grid.dim() == 2) {
            for (int i = 0; i < n; ++i) {
                x[0] = grid.coord(i);
                for (int j = 0; j < n; ++j) {
                    x[1] = grid.coord(j);
                    v[base + idx++] = f(x, c);
                }
            }
        } else {
            for (int i = 0; i < n; ++i) {
                x[0] = grid.coord(i);
                for (int j = 0; j < n; ++j) {
                    x[1] = grid.coord(j);
                    for (int l = 0; l < n; ++l) {
                        x[2] = grid.coord(l);
                        v[base + idx++] = f(x, c);
                    }
                }
            }
        }
    }
    return out;
}

std::vector<double>& Field::values() {
    if (!phys_valid_) sync_physical();
    spec_valid_ = false;
    return phys_;
}

const std::vector<double>& Field::values() const {
    if (!phys_valid_) sync_physical();
    return phys_;
}

const std::vector<cplx>& Field::spectral() const {
    if (!spec_valid_) sync_spectral();
    return spec_;
}

std::vector<cplx>& Field::spectral_mut() {
    if (!spec_valid_) sync_spectral();
    phys_valid_ = false;
    return spec_;
}

void Field::sync_spectral() const {
    const std::size_t npts = grid_.size();
    spec_.resize(components_ * npts);
    FftwBuffer buf(npts);
    PlanPair& plans = plan_for(grid_.dim(), grid_.points());
    const double scale = 1.0 / static_cast<double>(npts);
    for (int c = 0; c < components_; ++c) {
        const double* src = phys_.data() + c * npts;
        for (std::size_t i = 0; i < npts; ++i) {
            buf.data[i][0] = src[i];
            buf.data[i][1] = 0.0;
        }
        fftw_execute_dft(plans.fwd, buf.data, buf.data);
        cplx* dst = spec_.data() + c * npts;
        for (std::size_t i = 0; i < npts; ++i)
            dst[i] = cplx(buf.data[i][0] * scale, buf.data[i][1] * scale);
    }
    spec_valid_ = true;
}

void Field::sync_physical() const {
    const std::size_t npts = grid_.size();
    phys_.resize(components_ * npts);
    FftwBuffer buf(npts);
    PlanPair& plans = plan_for(grid_.dim(), grid_.points());
    for (int c = 0; c < components_; ++c) {
        const cplx* src = spec_.data() + c * npts;
        for (std::size_t i = 0; i < npts; ++i) {
            buf.data[i][0] = src[i].real();
            buf.data[i][1] = src[i].imag();
        }
        fftw_execute_dft(plans.bwd, buf.data, buf.data);
        double* dst = phys_.data() + c * npts;
        for (std::size_t i = 0; i < npts; ++i) dst[i] = buf.data[i][0];
    }
    phys_valid_ = true;
}

bool Field::finite() const {
    for (double v : values())
        if (!std::isfinite(v)) return false;
    return true;
}

void Field::require_finite(const char* who) const {
    if (!finite()) throw std::invalid_argument(std::string(who) + ": non-finite samples");
}

Field transform_roundtrip(const Field& field) {
    field.require_finite("transform_roundtrip");
    Field out = field;
    (void)out.spectral();       // force forward transform
    out.spectral_mut();         // mark physical stale
    (void)out.values();         // force inverse transform
    return out;
}

double lp_norm(const Field& field, double p) {
    if (!(p >= 1.0)) throw std::domain_error("lp_norm: p must be >= 1");
    const auto& v = field.values();
    const std::size_t npts = field.size();
    const int nc = field.components();
    if (std::isinf(p)) {
        double best = 0.0;
        for (std::size_t i = 0; i < npts; ++i) {
            double mag2 = 0.0;
            for (int c = 0; c < nc; ++c) {
                const double u = v[c * npts + i];
                mag2 += u * u;
            }
            best = std::max(best, mag2);
        }
        return std::sqrt(best);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]), p);
    return std::pow(acc * field.grid().cell_volume(), 1.0 / p);
}

double hdot_norm(const Field& field, double s) {
    if (s < 0.0) throw std::domain_error("hdot_norm: s must be >= 0");
    const auto& sp = field.spectral();
    const auto& g = field.grid();
    const std::size_t npts = g.size();
    const int nc = field.components();
    const double vol = std::pow(g.length(), g.dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
        const double k2 = g.k_squared(i);
        if (k2 == 0.0 && s > 0.0) continue;  // zero mode contributes 0 for s > 0
        double m2 = 0.0;
        for (int c = 0; c < nc; ++c) m2 += std::norm(sp[c * npts + i]);
        acc += (s == 0.0 ? 1.0 : std::pow(k2, s)) * m2;
    }
    return std::sqrt(vol * acc);
}

double dm_l2_norm(const Field& field, int m) {
    return hdot_norm(field, static_cast<double>(m));
}

Field spectral_derivative(const Field& field, const std::array<int, 3>& alpha) {
    const auto& g = field.grid();
    int order = 0;
    for (int d = 0; d < 3; ++d) {
        if (alpha[d] < 0) throw std::invalid_argument("spectral_derivative: negative order");
        if (d >= g.dim() && alpha[d] != 0)
            throw std::invalid_argument("spectral_derivative: alpha beyond dim");
        order += alpha[d];
    }
    if (order > max_derivative_order)
        throw std::domain_error("spectral_derivative: unsupported order");

    Field out = field;
    auto& sp = out.spectral_mut();
    const std::size_t npts = g.size();
    const int nc = field.components();
    const int n = g.points();
    for (std::size_t i = 0; i < npts; ++i) {
        const auto idx = g.unflatten(i);
        cplx sym(1.0, 0.0);
        for (int d = 0; d < g.dim(); ++d) {
            if (alpha[d] == 0) continue;
            double k = g.wavenumber(idx[d]);
            // (ik)^a at the Nyquist plane has no conjugate partner; zero it
            // for odd orders to keep the result real-valued.
            if (idx[d] == n / 2 && (alpha[d] % 2) != 0) { sym = 0.0; break; }
            cplx ik(0.0, k);
            for (int a = 0; a < alpha[d]; ++a) sym *= ik;
        }
        for (int c = 0; c < nc; ++c) sp[c * npts + i] *= sym;
    }
    return out;
}

Field derivative(const Field& field, int axis) {
    std::array<int, 3> alpha{0, 0, 0};
    alpha[axis] = 1;
    return spectral_derivative(field, alpha);
}

void dealias(Field& field) {
    const auto& g = field.grid();
    auto& sp = field.spectral_mut();
    const std::size_t npts = g.size();
    const int nc = field.components();
    const int cutoff = g.points() / 3;  // keep |freq| <= N/3
    for (std::size_t i = 0; i < npts; ++i) {
        const auto idx = g.unflatten(i);
        bool kill = false;
        for (int d = 0; d < g.dim(); ++d)
            if (std::abs(g.frequency(idx[d])) > cutoff) { kill = true; break; }
        if (kill)
            for (int c = 0; c < nc; ++c) sp[c * npts + i] = 0.0;
    }
}

BoundCertificate interpolation_check(const Field& field, double s1, double s, double s2) {
    if (!(0.0 <= s1 && s1 < s && s < s2))
        throw std::domain_error("interpolation_check: need 0 <= s1 < s < s2");
    const double lo = hdot_norm(field, s1);
    const double mid = hdot_norm(field, s);
    const double hi = hdot_norm(field, s2);

    double a1, a2;
    if (s1 == 0.0) {
        a1 = 1.0 - s / s2;
        a2 = s / s2;
    } else {
        // th1 + th2 = 1 and 1/s = th1/s1 + th2/s2 fix the Hoelder split.
        const double th1 = (1.0 / s - 1.0 / s2) / (1.0 / s1 - 1.0 / s2);
        const double th2 = 1.0 - th1;
        a1 = th1 * s / s1;
        a2 = th2 * s / s2;
    }
    BoundCertificate cert = BoundCertificate::make(
        "interpolation", mid, std::pow(lo, a1) * std::pow(hi, a2), 1.0, 1e-10);
    if (lo == 0.0 && hi == 0.0 && mid == 0.0) cert.indeterminate = true;
    return cert;
}

// --- serialization --------------------------------------------------------

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian");

namespace {
struct FieldHeader {
    char magic[8];
    std::uint32_t dim;
    std::uint32_t points;
    double length;
    std::uint32_t components;
    std::uint32_t reserved;
};
static_assert(sizeof(FieldHeader) == 32, "header must be 32 bytes");
constexpr char k_magic[8] = {'P', 'D', 'L', 'B', 'F', 'L', 'D', '1'};
} // namespace

void write_field(const std::string& path, const Field& field) {
    FieldHeader h{};
    std::memcpy(h.magic, k_magic, 8);
    h.dim = static_cast<std::uint32_t>(field.grid().dim());
    h.points = static_cast<std::uint32_t>(field.grid().points());
    h.length = field.grid().length();
    h.components = static_cast<std::uint32_t>(field.components());
    h.reserved = 0;
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("write_field: cannot open " + path);
    std::fwrite(&h, sizeof h, 1, fp);
    const auto& v = field.values();
    std::fwrite(v.data(), sizeof(double), v.size(), fp);
    std::fclose(fp);
}

Field read_field(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw std::runtime_error("read_field: cannot open " + path);
    FieldHeader h{};
    if (std::fread(&h, sizeof h, 1, fp) != 1 || std::memcmp(h.magic, k_magic, 8) != 0) {
        std::fclose(fp);
        throw std::runtime_error("read_field: bad header in " + path);
    }
    GridSpec grid(static_cast<int>(h.dim), static_cast<int>(h.points), h.length);
    Field out(grid, static_cast<int>(h.components));
    auto& v = out.values();
    const std::size_t want = v.size();
    const std::size_t got = std::fread(v.data(), sizeof(double), want, fp);
    std::fclose(fp);
    if (got != want) throw std::runtime_error("read_field: truncated file " + path);
    return out;
}

} // namespace pdelab
