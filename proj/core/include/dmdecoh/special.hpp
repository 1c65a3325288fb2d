#pragma once

#include <vector>

/// Bessel-type functions used by the rate kernels and partial-wave sums.
namespace dmdecoh::special {

/// J0(x); absolute error below 1e-12 near the origin, about 1e-11 asymptotically.
double bessel_j0(double x);

/// 1 - J0(x) without cancellation at small x.
double one_minus_j0(double x);

/// exp(-|x|) I0(x).
double bessel_i0_scaled(double x);

/// sin(x)/x.
double sinc(double x);

/// 1 - sin(x)/x without cancellation at small x.
double one_minus_sinc(double x);

/// j_l(x) for l = 0..lmax (x >= 0). Downward recurrence when x < lmax.
void sph_bessel_j(int lmax, double x, std::vector<double>& out);

/// y_l(x) for l = 0..lmax (x > 0), upward recurrence.
void sph_bessel_y(int lmax, double x, std::vector<double>& out);

/// exp(-x) i_l(x) for l = 0..lmax (x >= 0), modified spherical Bessel of the first kind.
void sph_bessel_i_scaled(int lmax, double x, std::vector<double>& out);

/// P_l(x) for l = 0..lmax.
void legendre_p(int lmax, double x, std::vector<double>& out);

/// Uniform-sphere form factor 3(sin x - x cos x)/x^3.
double sphere_form_factor(double x);

} // namespace dmdecoh::special
