#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdelab/certificate.hpp"

namespace pdelab {

using cplx = std::complex<double>;

// Periodic box [-L/2, L/2)^n, n in {1,2,3}, N points per axis (power of two).
// Wavenumbers follow the usual FFT layout: mode index m maps to the integer
// frequency m for m <= N/2 and m - N otherwise, k = 2*pi*freq / L.
class GridSpec {
  public:
    GridSpec(int dim, int points, double length);

    int dim() const { return dim_; }
    int points() const { return points_; }
    double length() const { return length_; }
    double dx() const { return length_ / points_; }
    double cell_volume() const { return cell_volume_; }
    std::size_t size() const { return size_; }  // N^n

    // Physical coordinate of sample index m along one axis.
    double coord(int m) const { return -0.5 * length_ + m * dx(); }
    // Wavenumber of FFT mode index m along one axis.
    double wavenumber(int m) const { return k_table_[m]; }
    // Integer frequency of FFT mode index m (N/2 maps to -N/2).
    int frequency(int m) const { return m < points_ / 2 ? m : m - points_; }

    // |k|_2^2 for flat spectral index idx.
    double k_squared(std::size_t idx) const;
    // Decompose a flat index into per-axis mode indices (x-axis slowest).
    std::array<int, 3> unflatten(std::size_t idx) const;

    bool operator==(const GridSpec& o) const {
        return dim_ == o.dim_ && points_ == o.points_ && length_ == o.length_;
    }

  private:
    int dim_;
    int points_;
    double length_;
    double cell_volume_;
    std::size_t size_;
    std::vector<double> k_table_;
};

// Real-valued field (scalar or dim-component vector) sampled on a GridSpec,
// with a lazily synchronized spectral view.  Component c of the physical
// data lives at values()[c*size() .. (c+1)*size()); the flattening order is
// x slowest, last axis fastest, matching GridSpec::unflatten.
class Field {
  public:
    Field() = default;
    Field(GridSpec grid, int components);

    static Field from_function(
        const GridSpec& grid, int components,
        const std::function<double(const std::array<double, 3>&, int)>& f);

    const GridSpec& grid() const { return grid_; }
    int components() const { return components_; }
    std::size_t size() const { return grid_.size(); }

    std::vector<double>& values();              // invalidates spectral view
    const std::vector<double>& values() const;  // syncs from spectral if needed
    const std::vector<cplx>& spectral() const;  // syncs from physical if needed
    std::vector<cplx>& spectral_mut();          // invalidates physical view

    double at(std::size_t idx, int c = 0) const { return values()[c * size() + idx]; }

    bool finite() const;
    void require_finite(const char* who) const;

  private:
    void sync_spectral() const;
    void sync_physical() const;

    GridSpec grid_{1, 8, 1.0};
    int components_ = 0;
    mutable std::vector<double> phys_;
    mutable std::vector<cplx> spec_;
    mutable bool phys_valid_ = false;
    mutable bool spec_valid_ = false;
};

// --- grid_spectral operations -------------------------------------------

// inverse(forward(field)); test plumbing for the transform pair.
Field transform_roundtrip(const Field& field);

// L^p norm per the componentwise convention
//   ||u||_p = { sum_i int |u_i|^p dx }^{1/p},  1 <= p < inf,
// cell-volume Riemann quadrature; p = inf returns the max over samples of
// the pointwise Euclidean magnitude |u(x)|_2.
double lp_norm(const Field& field, double p);

// Homogeneous Sobolev norm { L^n sum_k |k|^{2s} |u_hat(k)|_2^2 }^{1/2};
// s = 0 coincides with lp_norm(field, 2) by Parseval.
double hdot_norm(const Field& field, double s);

// Aggregated m-th derivative L^2 norm (all order-m derivatives of all
// components); identical to hdot_norm(field, m) by Parseval.
double dm_l2_norm(const Field& field, int m);

// Multiplies spectral coefficients by (i k)^alpha.  Orders above
// max_derivative_order are rejected.
inline constexpr int max_derivative_order = 4;
Field spectral_derivative(const Field& field, const std::array<int, 3>& alpha);

// Convenience: first derivative along one axis.
Field derivative(const Field& field, int axis);

// Zero the top third of modes in every axis (2/3 dealiasing).
void dealias(Field& field);

// Interpolation certificate for 0 <= s1 < s < s2:
//   ||u||_{H^s} <= ||u||_{H^{s1}}^{a1} ||u||_{H^{s2}}^{a2},
// a1 = th1*s/s1, a2 = th2*s/s2 with th1+th2 = 1, 1/s = th1/s1 + th2/s2;
// s1 = 0 degenerates to ||u||_{H^s} <= ||u||_2^{1-s/s2} ||u||_{H^{s2}}^{s/s2}.
BoundCertificate interpolation_check(const Field& field, double s1, double s, double s2);

// --- serialization --------------------------------------------------------

// Flat little-endian doubles behind a 32-byte header (n, N, L, components).
void write_field(const std::string& path, const Field& field);
Field read_field(const std::string& path);

} // namespace pdelab
