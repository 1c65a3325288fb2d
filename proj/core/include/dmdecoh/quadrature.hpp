#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <vector>

/// One-dimensional quadrature: Gauss-Kronrod panels with global adaptive bisection.
namespace dmdecoh::quad {

template <class T>
struct Result
{
    T value{};
    double abs_err = 0.0;
    int evaluations = 0;
    bool converged = true;
};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z); }

namespace detail {

// 15-point Kronrod abscissae on [0, 1] (symmetric), with the embedded 7-point Gauss weights.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

} // namespace detail

/// One G7K15 panel; the error uses the QUADPACK rescaling of |K15 - G7|.
template <class T, class F>
Result<T> gk15(F&& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const T fc = f(center);
    T resk = fc * detail::wgk[7];
    T resg = fc * detail::wg[3];
    double resabs = magnitude(fc) * detail::wgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * detail::xgk[j];
        const T f1 = f(center - dx);
        const T f2 = f(center + dx);
        resk += (f1 + f2) * detail::wgk[j];
        resabs += (magnitude(f1) + magnitude(f2)) * detail::wgk[j];
        if (j % 2 == 1)
            resg += (f1 + f2) * detail::wg[j / 2];
    }
    Result<T> r;
    r.value = resk * half;
    r.evaluations = 15;
    double err = magnitude((resk - resg) * half);
    const double absval = resabs * std::abs(half);
    if (err > 0.0)
        err *= std::min(1.0, std::pow(200.0 * err / std::max(absval, 1e-300), 1.5));
    r.abs_err = std::max(err, 50.0 * 2.2e-16 * absval);
    return r;
}

struct Options
{
    double rel_tol = 1e-3;
    double abs_tol = 0.0;
    int max_intervals = 2000;
};

/// Global adaptive integration over [points.front(), points.back()] with the given breakpoints.
template <class T, class F>
Result<T> integrate(F&& f, std::span<const double> points, const Options& opt = {})
{
    struct Piece
    {
        double a, b;
        T value;
        double err;
        bool operator<(const Piece& o) const { return err < o.err; }
    };
    std::priority_queue<Piece> heap;
    Result<T> total;
    total.value = T{};
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i]))
            continue;
        auto r = gk15<T>(f, points[i], points[i + 1]);
        heap.push({points[i], points[i + 1], r.value, r.abs_err});
        total.value += r.value;
        total.abs_err += r.abs_err;
        total.evaluations += r.evaluations;
    }
    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * magnitude(total.value)); };
    while (!heap.empty() && total.abs_err > target()) {
        if (static_cast<int>(heap.size()) >= opt.max_intervals) {
            total.converged = false;
            break;
        }
        Piece p = heap.top();
        heap.pop();
        const double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) {
            total.converged = false;
            break;
        }
        auto left = gk15<T>(f, p.a, mid);
        auto right = gk15<T>(f, mid, p.b);
        total.value += left.value + right.value - p.value;
        total.abs_err += left.abs_err + right.abs_err - p.err;
        total.evaluations += 30;
        heap.push({p.a, mid, left.value, left.abs_err});
        heap.push({mid, p.b, right.value, right.abs_err});
    }
    // Re-sum to shed accumulated rounding from the running updates.
    T sum{};
    double err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().err;
        heap.pop();
    }
    total.value = sum;
    total.abs_err = err;
    return total;
}

template <class T, class F>
Result<T> integrate(F&& f, double a, double b, const Options& opt = {})
{
    const std::array<double, 2> pts = {a, b};
    return integrate<T>(f, std::span<const double>(pts), opt);
}

/// Sorted, de-duplicated breakpoints clipped to [a, b], endpoints included.
inline std::vector<double> breakpoints(double a, double b, std::initializer_list<double> inner)
{
    std::vector<double> pts{a, b};
    for (double x : inner)
        if (std::isfinite(x) && x > a && x < b)
            pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
struct GaussLegendre
{
    std::vector<double> x;
    std::vector<double> w;
    explicit GaussLegendre(int n);
};

/// Cached rule for small orders (thread-safe static initialization).
const GaussLegendre& gauss_legendre(int n);

template <class T, class F>
T fixed_gl(F&& f, double a, double b, const GaussLegendre& rule)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T sum{};
    for (std::size_t i = 0; i < rule.x.size(); ++i)
        sum += f(c + h * rule.x[i]) * rule.w[i];
    return sum * h;
}

} // namespace dmdecoh::quad
