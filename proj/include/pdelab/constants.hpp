#pragma once

#include <cmath>

// Numerical constants shared across the certification suites.  Values that
// come from the literature are rigorous upper bounds, not sharp constants;
// every certificate treats them as one-sided.
namespace pdelab::constants {

// Gagliardo-Nirenberg sup-norm constant, n = 3:
//   ||u||_inf <= K0 ||u||_2^{1/4} ||D^2 u||_2^{3/4}
inline constexpr double k_gn0 = 0.678;

// ||Du||_2 <= K1 ||u||_2^{1/2} ||D^2 u||_2^{1/2}  (exact via Fourier)
inline constexpr double k_gn1 = 1.0;

// Combination constant K2 = K0 * sqrt(K1) < 1.
inline const double k_gn2 = k_gn0 * std::sqrt(k_gn1);

// L^3 interpolation constant, n = 3 (Agueh's bound):
//   ||u||_3 <= K3 ||u||_2^{1/2} ||Du||_2^{1/2}
inline constexpr double k_gn3 = 0.581862001307;

// Nash constant upper bound used by default.  The true K(n) is < 1 for all
// n; keeping 1.0 keeps every derived bound rigorous.
inline constexpr double k_nash_default = 1.0;

// Stokes-nonlinearity smoothing constant of the L^2 estimate
//   ||e^{nu Lap (t-s)} Q(s)||_2 <= K nu^{-3/4} (t-s)^{-3/4} ||u||_2 ||Du||_2
// in three dimensions.
inline const double k_q_smoothing = std::pow(8.0 * M_PI, -0.75);

// Gradient-monotonicity onset coefficient: the onset time is below
//   t_coef * nu^{-5} ||u0||_2^4,  t_coef = K3^12 / 2 < 0.000753026.
inline const double k_tstar_coef_bound = 0.000753026;

} // namespace pdelab::constants
