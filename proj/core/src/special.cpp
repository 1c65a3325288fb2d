#include "dmdecoh/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dmdecoh::special {

namespace {

constexpr double pi = std::numbers::pi;

// Power series of J0 minus its leading 1; alternating, exact enough up to |x| ~ 12.
double j0_series_tail(double x)
{
    const double y = -0.25 * x * x;
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 80; ++k) {
        term *= y / (double(k) * double(k));
        sum += term;
        if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum)))
            break;
    }
    return sum;
}

double j0_asymptotic(double x)
{
    // Hankel expansion; terms shrink until k ~ 2x, so truncation stays below e^{-2x}.
    double p = 0.0;
    double q = 0.0;
    double t = 1.0;
    double prev = 2.0;
    const double inv8x = 1.0 / (8.0 * x);
    for (int k = 0; k < 60; ++k) {
        if (k > 0) {
            const double odd = 2.0 * k - 1.0;
            t *= -odd * odd * inv8x / k;
        }
        if (std::abs(t) > prev)
            break;
        prev = std::abs(t);
        switch (k % 4) {
        case 0: p += t; break;
        case 1: q += t; break;
        case 2: p -= t; break;
        case 3: q -= t; break;
        }
        if (prev < 1e-17)
            break;
    }
    const double phase = x - 0.25 * pi;
    return std::sqrt(2.0 / (pi * x)) * (p * std::cos(phase) - q * std::sin(phase));
}

} // namespace

double bessel_j0(double x)
{
    x = std::abs(x);
    if (x <= 12.0)
        return 1.0 + j0_series_tail(x);
    return j0_asymptotic(x);
}

double one_minus_j0(double x)
{
    x = std::abs(x);
    if (x <= 2.0)
        return -j0_series_tail(x);
    return 1.0 - bessel_j0(x);
}

double bessel_i0_scaled(double x)
{
    x = std::abs(x);
    if (x <= 20.0) {
        const double y = 0.25 * x * x;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= y / (double(k) * double(k));
            sum += term;
            if (term < 1e-17 * sum)
                break;
        }
        return sum * std::exp(-x);
    }
    double sum = 1.0;
    double t = 1.0;
    const double inv8x = 1.0 / (8.0 * x);
    for (int k = 1; k < 40; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = t * odd * odd * inv8x / k;
        if (next > t || next < 1e-17)
            break;
        t = next;
        sum += t;
    }
    return sum / std::sqrt(2.0 * pi * x);
}

double sinc(double x)
{
    if (std::abs(x) < 1e-4)
        return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double one_minus_sinc(double x)
{
    if (std::abs(x) < 0.5) {
        const double y = -x * x;
        double term = 1.0;
        double sum = 0.0;
        for (int k = 1; k < 30; ++k) {
            term *= y / ((2.0 * k) * (2.0 * k + 1.0));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum))
                break;
        }
        return -sum;
    }
    return 1.0 - std::sin(x) / x;
}

void sph_bessel_j(int lmax, double x, std::vector<double>& out)
{
    out.assign(static_cast<std::size_t>(lmax) + 1, 0.0);
    x = std::abs(x);
    if (x == 0.0) {
        out[0] = 1.0;
        return;
    }
    if (x < 1e-6) {
        // Leading terms x^l/(2l+1)!! (1 - x^2/(2(2l+3))).
        double lead = 1.0;
        for (int l = 0; l <= lmax; ++l) {
            if (l > 0)
                lead *= x / (2.0 * l + 1.0);
            out[l] = lead * (1.0 - x * x / (2.0 * (2.0 * l + 3.0)));
            if (lead == 0.0)
                break;
        }
        return;
    }
    const double s = std::sin(x);
    const double c = std::cos(x);
    const double j0 = s / x;
    if (x > lmax) {
        out[0] = j0;
        if (lmax >= 1)
            out[1] = s / (x * x) - c / x;
        for (int l = 1; l < lmax; ++l)
            out[l + 1] = (2.0 * l + 1.0) / x * out[l] - out[l - 1];
        return;
    }
    const int start = lmax + 16 + static_cast<int>(std::sqrt(40.0 * (lmax + 1)));
    double fp1 = 0.0;
    double f = 1e-300;
    for (int l = start; l >= 0; --l) {
        if (l <= lmax)
            out[l] = f;
        if (l == 0)
            break;
        const double fm1 = (2.0 * l + 1.0) / x * f - fp1;
        fp1 = f;
        f = fm1;
        if (std::abs(f) > 1e250) {
            f *= 1e-250;
            fp1 *= 1e-250;
            for (int k = l; k <= lmax; ++k)
                out[k] *= 1e-250;
        }
    }
    double scale;
    if (std::abs(j0) > 0.1 || lmax == 0) {
        scale = j0 / out[0];
    } else {
        const double j1 = s / (x * x) - c / x;
        scale = j1 / out[1];
    }
    for (auto& v : out)
        v *= scale;
}

void sph_bessel_y(int lmax, double x, std::vector<double>& out)
{
    out.assign(static_cast<std::size_t>(lmax) + 1, 0.0);
    const double s = std::sin(x);
    const double c = std::cos(x);
    out[0] = -c / x;
    if (lmax >= 1)
        out[1] = -c / (x * x) - s / x;
    for (int l = 1; l < lmax; ++l)
        out[l + 1] = (2.0 * l + 1.0) / x * out[l] - out[l - 1];
}

void sph_bessel_i_scaled(int lmax, double x, std::vector<double>& out)
{
    out.assign(static_cast<std::size_t>(lmax) + 1, 0.0);
    x = std::abs(x);
    if (x == 0.0) {
        out[0] = 1.0;
        return;
    }
    const double i0 = x < 1e-8 ? 1.0 - x : -std::expm1(-2.0 * x) / (2.0 * x);
    const int start = lmax + 16 + static_cast<int>(std::sqrt(40.0 * (lmax + 1)) + x);
    double fp1 = 0.0;
    double f = 1e-300;
    for (int l = start; l >= 0; --l) {
        if (l <= lmax)
            out[l] = f;
        if (l == 0)
            break;
        const double fm1 = (2.0 * l + 1.0) / x * f + fp1;
        fp1 = f;
        f = fm1;
        if (std::abs(f) > 1e250) {
            f *= 1e-250;
            fp1 *= 1e-250;
            for (int k = l; k <= lmax; ++k)
                out[k] *= 1e-250;
        }
    }
    const double scale = i0 / out[0];
    for (auto& v : out)
        v *= scale;
}

void legendre_p(int lmax, double x, std::vector<double>& out)
{
    out.assign(static_cast<std::size_t>(lmax) + 1, 0.0);
    out[0] = 1.0;
    if (lmax >= 1)
        out[1] = x;
    for (int l = 1; l < lmax; ++l)
        out[l + 1] = ((2.0 * l + 1.0) * x * out[l] - l * out[l - 1]) / (l + 1.0);
}

double sphere_form_factor(double x)
{
    x = std::abs(x);
    if (x < 1e-2) {
        const double x2 = x * x;
        return 1.0 - x2 / 10.0 + x2 * x2 / 280.0;
    }
    return 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

} // namespace dmdecoh::special
