#include "dmdecoh/decoherence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "dmdecoh/born.hpp"
#include "dmdecoh/errors.hpp"
#include "dmdecoh/parallel.hpp"
#include "dmdecoh/quadrature.hpp"
#include "dmdecoh/special.hpp"
#include "dmdecoh/units.hpp"

namespace dmdecoh {

namespace {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

struct KernelParams
{
    double alpha = 0.0; // xiSep
    double beta = 0.0;  // xiMed
    double sigma = 0.0; // xiRad
    double acoh = 0.0;  // A (N_a - 1)
    double dw = 0.0;    // exp(-dw s^2 C^2) multiplies the coherent term
};

KernelParams kernel_params(const DMScenario& sc, const TargetModel& target)
{
    const auto g = dimensionless_groups(sc, target.experiment);
    KernelParams p;
    p.alpha = g.xiSep;
    p.beta = g.xiMed;
    p.sigma = g.xiRad;
    const auto& e = target.experiment;
    p.acoh = e.massNumber * (e.nuclei() - 1.0);
    if (target.debyeWaller) {
        const double twoK = 2.0 * sc.momentum();
        p.dw = twoK * twoK * target.mean_square_displacement() / 3.0;
    }
    return p;
}

/// Yukawa propagator squared times the structure-factor bracket, at q = 2 M vBar s C.
double envelope(const KernelParams& p, double s, double C)
{
    const double bq = p.beta * s * C;
    const double den = 1.0 + bq * bq;
    double coh = 0.0;
    if (p.acoh > 0.0) {
        const double f = special::sphere_form_factor(p.sigma * s * C);
        coh = p.acoh * f * f;
        if (p.dw > 0.0)
            coh *= std::exp(-p.dw * s * s * C * C);
    }
    return (1.0 + coh) / (den * den);
}

/// Natural scales of the envelope in C at speed s, used as breakpoints.
std::vector<double> envelope_breaks(const KernelParams& p, double s)
{
    std::vector<double> pts{0.0, 1.0};
    for (double scale : {p.beta * s, p.sigma * s}) {
        if (!(scale > 1.0))
            continue;
        for (double f : {0.3, 1.0, 3.0, 10.0, 30.0, 100.0}) {
            const double x = f / scale;
            if (x < 1.0)
                pts.push_back(x);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

/// Integral of C * envelope over [0, 1]: the kernel-free total-rate factor.
double envelope_integral(const KernelParams& p, double s, double relTol)
{
    const auto pts = envelope_breaks(p, s);
    auto f = [&](double C) { return C * envelope(p, s, C); };
    return quad::integrate<double>(f, std::span<const double>(pts),
                                   {.rel_tol = relTol, .abs_tol = 0.0, .max_intervals = 800})
        .value;
}

/// Upper bound on the integral of C' * envelope over [C, 1].
///
/// Uses f~^2 <= 1 and, for x = xiRad s C >= 1, f~(x)^2 <= 9 (1 + x)^2 / x^6 <= 36 / x^4.
/// A bound is needed rather than G1 minus the running sum: once the tail drops below
/// the quadrature error of G1 that difference is noise and would stop integration early.
double envelope_tail_bound(const KernelParams& p, double s, double C)
{
    const double b2 = p.beta * p.beta * s * s;
    // Integral of C' / (1 + b2 C'^2)^2 over [C, 1].
    const double prop = b2 > 0.0 ? 0.5 * (1.0 / (1.0 + b2 * C * C) - 1.0 / (1.0 + b2)) / b2
                                 : 0.5 * (1.0 - C * C);
    double coh = prop;
    const double x = p.sigma * s * C;
    if (x >= 1.0) {
        const double den = 1.0 + b2 * C * C;
        const double sig4 = std::pow(p.sigma * s, 4);
        coh = std::min(coh, 18.0 / (sig4 * C * C * den * den));
    }
    return prop + p.acoh * coh;
}

// Complex panel value paired with the envelope integral over the same panel.
struct Pair
{
    cplx z;
    double r = 0.0;
    Pair operator+(const Pair& o) const { return {z + o.z, r + o.r}; }
    Pair operator-(const Pair& o) const { return {z - o.z, r - o.r}; }
    Pair operator*(double a) const { return {z * a, r * a}; }
    Pair& operator+=(const Pair& o)
    {
        z += o.z;
        r += o.r;
        return *this;
    }
    friend double magnitude(const Pair& p) { return std::abs(p.z); }
};

struct InnerResult
{
    cplx value;
    double err = 0.0;
    bool capped = false;
};

template <class F>
Pair panel_adaptive(F&& f, double a, double b, double tol, int depth, double& err)
{
    auto r = quad::gk15<Pair>(f, a, b);
    if (r.abs_err <= tol || depth <= 0) {
        err += r.abs_err;
        return r.value;
    }
    const double mid = 0.5 * (a + b);
    return panel_adaptive(f, a, mid, 0.5 * tol, depth - 1, err)
           + panel_adaptive(f, mid, b, 0.5 * tol, depth - 1, err);
}

/// Integral over C in [0, 1] of C * envelope * kernel, with |kernel| <= 2.
///
/// Panels follow the oscillation period pi/(xiSep s) and grow geometrically
/// through the envelope scales. Integration stops once the envelope tail can
/// no longer change the result at the requested tolerance; past the panel cap
/// the oscillatory part is dropped and the kernel replaced by its mean 1.
template <class Kernel>
InnerResult inner_integral(const KernelParams& p, double s, double G1, Kernel&& kernel,
                           double relTol, int maxPanels)
{
    InnerResult out;
    const double osc = p.alpha * s;
    const double width_osc = osc > 0.0 ? pi / osc : 2.0;
    double cmin = 1.0;
    if (p.beta * s > 0.0)
        cmin = std::min(cmin, 1.0 / (p.beta * s));
    if (p.sigma * s > 0.0)
        cmin = std::min(cmin, 1.0 / (p.sigma * s));
    cmin /= 8.0;
    const double sig = p.sigma * s;
    const double ffWindow = sig > 0.0 ? 30.0 / sig : 0.0;
    const double width_ff = sig > 0.0 ? pi / sig : 2.0;

    auto f = [&](double C) {
        const double env = C * envelope(p, s, C);
        return Pair{kernel(C) * env, env};
    };

    Pair acc{};
    double C = 0.0;
    int panels = 0;
    while (C < 1.0) {
        double width = std::min(width_osc, std::max(C, cmin));
        if (C < ffWindow)
            width = std::min(width, width_ff);
        const double next = std::min(1.0, C + width);
        const double tol = 1e-3 * relTol * std::max(std::abs(acc.z), 1e-300)
                           + 1e-12 * G1 * (next - C);
        acc += panel_adaptive(f, C, next, tol, 8, out.err);
        C = next;
        ++panels;
        if (C >= 1.0)
            break;
        const double bound = envelope_tail_bound(p, s, C);
        if (2.0 * bound <= 1e-2 * relTol * std::abs(acc.z)) {
            out.err += 2.0 * bound;
            break;
        }
        if (panels >= maxPanels) {
            const double tail = std::min(bound, std::max(0.0, G1 - acc.r));
            acc.z += tail;
            out.err += 2.0 * tail;
            out.capped = true;
            break;
        }
    }
    out.value = acc.z;
    return out;
}

/// 1 - exp(i phase) J0(b), accurate when both arguments are small.
cplx triple_kernel(double phase, double b)
{
    const double j0 = special::bessel_j0(b);
    const double sh = std::sin(0.5 * phase);
    const cplx em1(-2.0 * sh * sh, std::sin(phase));
    return special::one_minus_j0(b) - j0 * em1;
}

double prefactor(const DMScenario& sc, const TargetModel& target)
{
    const double m2 = sc.m * sc.m;
    return 32.0 * pi * sc.alphaM * sc.alphaDM * sc.rhoDM * sc.M * sc.vBar
           * target.experiment.nucleons / (m2 * m2);
}

// Legendre coefficients r_l = (2l+1) i_l(x)/i_0(x) P_l(cw) i^l, truncated where negligible.
std::vector<cplx> legendre_coefficients(double x, double cw)
{
    int lmax = static_cast<int>(x + 12.0 * std::sqrt(x + 1.0) + 12.0);
    std::vector<double> il, pl;
    special::sph_bessel_i_scaled(lmax, x, il);
    special::legendre_p(lmax, cw, pl);
    std::vector<cplx> r;
    const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int l = 0; l <= lmax; ++l) {
        const double mag = (2.0 * l + 1.0) * il[l] / il[0];
        if (l > 2 && mag < 1e-14)
            break;
        r.push_back(mag * pl[l] * ipow[l % 4]);
    }
    return r;
}

struct RateParts
{
    cplx F;
    double err = 0.0;
    double total = 0.0;
};

RateParts compute_rate(const DMScenario& sc, const TargetModel& target, const FluxModel& flux,
                       double windAngle, const RateOptions& opt, bool wantRate)
{
    const KernelParams p = kernel_params(sc, target);
    const DirectionalDensity dens(flux, windAngle);
    const double relTol = opt.relTol;
    const double innerTol = relTol / 16.0;
    const auto sPts = dens.s_breaks();

    RateRoute route = opt.route;
    if (route == RateRoute::automatic)
        route = dens.kind() == DirectionalDensity::Kind::masked ? RateRoute::triple
                                                               : RateRoute::legendre;
    if (route == RateRoute::legendre && dens.kind() == DirectionalDensity::Kind::masked)
        throw ValidationError("route", "the Legendre reduction needs an unmasked or isotropic flux");

    bool innerCapped = false;
    RateParts out;

    // Total rate: kernel replaced by 1.
    {
        auto f = [&](double s) {
            if (s <= 0.0)
                return 0.0;
            return s * s * s * dens.total(s) * envelope_integral(p, s, innerTol);
        };
        const auto r = quad::integrate<double>(
            f, std::span<const double>(sPts),
            {.rel_tol = relTol / 4.0, .abs_tol = 0.0, .max_intervals = opt.maxIntervals});
        out.total = r.value;
    }
    if (!wantRate)
        return out;
    if (p.alpha == 0.0 || sc.alphaM == 0.0)
        return out;

    quad::Result<cplx> outer;
    if (route == RateRoute::legendre) {
        const bool iso = dens.kind() == DirectionalDensity::Kind::isotropic;
        const double cw = dens.drift_cosine();
        auto f = [&](double s) -> cplx {
            if (s <= 0.0)
                return 0.0;
            const double D = dens.total(s);
            if (D == 0.0)
                return 0.0;
            const double G1 = envelope_integral(p, s, innerTol);
            InnerResult in;
            if (iso) {
                in = inner_integral(
                    p, s, G1, [&](double C) { return cplx(special::one_minus_sinc(p.alpha * s * C)); },
                    innerTol, opt.maxPanels);
            } else {
                const auto coef = legendre_coefficients(2.0 * s * dens.drift(), cw);
                const int L = static_cast<int>(coef.size()) - 1;
                std::vector<double> jl, pl;
                in = inner_integral(
                    p, s, G1,
                    [&](double C) {
                        const double y = p.alpha * s * C;
                        cplx k = special::one_minus_sinc(y);
                        if (L >= 1) {
                            special::sph_bessel_j(L, y, jl);
                            special::legendre_p(L, C, pl);
                            for (int l = 1; l <= L; ++l)
                                k -= coef[l] * (pl[l] * jl[l]);
                        }
                        return k;
                    },
                    innerTol, opt.maxPanels);
            }
            innerCapped = innerCapped || in.capped;
            return s * s * s * D * in.value;
        };
        outer = quad::integrate<cplx>(
            f, std::span<const double>(sPts),
            {.rel_tol = relTol, .abs_tol = 0.0, .max_intervals = opt.maxIntervals});
    } else {
        const auto cPts = dens.c_breaks();
        auto f = [&](double s) -> cplx {
            if (s <= 0.0)
                return 0.0;
            const double G1 = envelope_integral(p, s, innerTol);
            const double refl = dens.reflected(s);
            auto g = [&](double c) -> cplx {
                const double W = dens.angular(s, c, refl);
                if (W == 0.0)
                    return 0.0;
                const double Sc = std::sqrt(std::max(0.0, 1.0 - c * c));
                auto in = inner_integral(
                    p, s, G1,
                    [&](double C) {
                        const double y = p.alpha * s * C;
                        const double SC = std::sqrt(std::max(0.0, 1.0 - C * C));
                        return triple_kernel(y * C * c, y * SC * Sc);
                    },
                    innerTol, opt.maxPanels);
                innerCapped = innerCapped || in.capped;
                return W * in.value;
            };
            const auto mid = quad::integrate<cplx>(
                g, std::span<const double>(cPts),
                {.rel_tol = relTol / 4.0, .abs_tol = 0.0, .max_intervals = 200});
            return s * s * s * mid.value;
        };
        outer = quad::integrate<cplx>(
            f, std::span<const double>(sPts),
            {.rel_tol = relTol, .abs_tol = 0.0, .max_intervals = opt.maxIntervals});
    }
    out.F = outer.value;
    out.err = outer.abs_err + relTol / 4.0 * std::abs(outer.value);
    if (!outer.converged)
        throw ConvergenceError("decoherence rate quadrature did not converge",
                               prefactor(sc, target) * outer.value / units::hbar_eV_s,
                               units::rate_per_s(prefactor(sc, target) * out.err));
    (void)innerCapped;
    return out;
}

} // namespace

double TargetModel::mean_square_displacement() const
{
    const double d = experiment.rmsDisplacement300K;
    const double y2 = d * d * temperature / (300.0 * units::kelvin);
    return std::max(y2, zeroPointFloor * zeroPointFloor);
}

double TargetModel::debye_waller_factor(double q) const
{
    if (!debyeWaller)
        return 1.0;
    return std::exp(-q * q * mean_square_displacement() / 3.0);
}

double sphere_form_factor(double x)
{
    if (!(x >= 0.0))
        throw ValidationError("x", "must be >= 0");
    return special::sphere_form_factor(x);
}

double structure_factor(double q, const TargetModel& target)
{
    if (!(q >= 0.0))
        throw ValidationError("q", "must be >= 0");
    const auto& e = target.experiment;
    const double Na = e.nuclei();
    const double f = special::sphere_form_factor(q * e.radius);
    return e.nucleons
           + e.massNumber * e.massNumber * Na * (Na - 1.0) * f * f * target.debye_waller_factor(q);
}

std::string classify_regime(const DMScenario& scenario, const TargetModel& target)
{
    const auto g = dimensionless_groups(scenario, target.experiment);
    const double k = scenario.momentum();
    const double q = 1.0 / std::max({1.0 / scenario.m, target.experiment.radius, 1.0 / k});
    const auto& e = target.experiment;
    const double f = special::sphere_form_factor(q * e.radius);
    const double enhancement
        = e.massNumber * (e.nuclei() - 1.0) * f * f * target.debye_waller_factor(q);
    if (enhancement < 1.0)
        return "incoherent-floor";
    const double omega = std::max({g.xiMed, g.xiRad, 1.0});
    if (g.xiSep >= 10.0 * omega)
        return "coherent-large-sep";
    if (10.0 * g.xiSep <= omega)
        return "coherent-small-sep";
    return "mixed";
}

DecoherenceResult decoherence_rate(const DMScenario& scenario, const TargetModel& target,
                                   const FluxModel& flux, double windAngle,
                                   const RateOptions& options)
{
    scenario.validate();
    target.experiment.validate();
    const auto parts = compute_rate(scenario, target, flux, windAngle, options, true);
    const double pref = prefactor(scenario, target);
    DecoherenceResult r;
    r.rate = pref * parts.F / units::hbar_eV_s;
    r.absErr = units::rate_per_s(pref * parts.err);
    r.errRe = r.absErr;
    r.errIm = r.absErr;
    r.totalRate = units::rate_per_s(pref * parts.total);
    r.regime = classify_regime(scenario, target);
    r.bornValid = born_validity(scenario, target.experiment).valid;
    return r;
}

double total_scattering_rate(const DMScenario& scenario, const TargetModel& target,
                             const FluxModel& flux, double windAngle, const RateOptions& options)
{
    scenario.validate();
    target.experiment.validate();
    const auto parts = compute_rate(scenario, target, flux, windAngle, options, false);
    return units::rate_per_s(prefactor(scenario, target) * parts.total);
}

double yukawa_total_cross_section(const DMScenario& sc, double k)
{
    const double m2 = sc.m * sc.m;
    return 16.0 * pi * sc.alphaM * sc.alphaDM * sc.M * sc.M / (m2 * (m2 + 4.0 * k * k));
}

double yukawa_inverse_cdf(double k, double m, double P)
{
    // CDF(u) proportional to 1/b - 1/(a u + b), a = 2 k^2, b = m^2, u in [0, 2].
    const double a = 2.0 * k * k;
    const double b = m * m;
    return 2.0 * P * b / (b + 2.0 * a * (1.0 - P));
}

DecoherenceResult decoherence_rate_mc(const DMScenario& scenario, const TargetModel& target,
                                      const FluxModel& flux, double windAngle,
                                      std::int64_t nSamples, std::uint64_t seed, int threads)
{
    scenario.validate();
    target.experiment.validate();
    if (nSamples < 10000)
        throw ValidationError("nSamples", "must be >= 1e4");
    const MomentumSampler sampler(flux, windAngle);
    double densityScale = 1.0;
    if (flux.masked() && flux.mode != FluxMode::thermalized)
        densityScale
            = horizon_density_fraction(scenario, flux.site, flux.siderealPhase).total();
    const Vec3 dx = sampler.axis() * target.experiment.separation;
    const double n = scenario.number_density() * densityScale;

    constexpr std::int64_t chunk = 4096;
    const std::int64_t nChunks = (nSamples + chunk - 1) / chunk;
    struct Sums
    {
        double re = 0, im = 0, re2 = 0, im2 = 0, w = 0, w2 = 0;
    };
    std::vector<Sums> sums(static_cast<std::size_t>(nChunks));
    parallel_for(static_cast<std::size_t>(nChunks), threads, [&](std::size_t c) {
        std::mt19937_64 rng(derive_seed(seed, c));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const std::int64_t begin = static_cast<std::int64_t>(c) * chunk;
        const std::int64_t end = std::min(nSamples, begin + chunk);
        Sums s;
        for (std::int64_t i = begin; i < end; ++i) {
            const Vec3 kv = sampler(rng);
            const double k = norm(kv);
            const Vec3 kh = kv * (1.0 / k);
            const double u = yukawa_inverse_cdf(k, scenario.m, uni(rng));
            const double ct = 1.0 - u;
            const double st = std::sqrt(std::max(0.0, u * (2.0 - u)));
            const double ph = 2.0 * pi * uni(rng);
            const Vec3 e1 = orthogonal(kh);
            const Vec3 e2 = cross(kh, e1);
            const Vec3 kout = (kh * ct + (e1 * std::cos(ph) + e2 * std::sin(ph)) * st) * k;
            const Vec3 q = kv - kout;
            const double qmag = k * std::sqrt(2.0 * u);
            const double w = n * (k / scenario.M) * yukawa_total_cross_section(scenario, k)
                             * structure_factor(qmag, target);
            const double phase = dot(q, dx);
            const double sh = std::sin(0.5 * phase);
            const double re = w * 2.0 * sh * sh;
            const double im = -w * std::sin(phase);
            s.re += re;
            s.im += im;
            s.re2 += re * re;
            s.im2 += im * im;
            s.w += w;
            s.w2 += w * w;
        }
        sums[c] = s;
    });
    Sums t;
    for (const auto& s : sums) {
        t.re += s.re;
        t.im += s.im;
        t.re2 += s.re2;
        t.im2 += s.im2;
        t.w += s.w;
        t.w2 += s.w2;
    }
    const double N = static_cast<double>(nSamples);
    auto stderr_of = [N](double sum, double sum2) {
        const double mean = sum / N;
        return std::sqrt(std::max(0.0, sum2 / N - mean * mean) / (N - 1.0));
    };
    DecoherenceResult r;
    r.rate = cplx(t.re / N, t.im / N) / units::hbar_eV_s;
    r.errRe = units::rate_per_s(stderr_of(t.re, t.re2));
    r.errIm = units::rate_per_s(stderr_of(t.im, t.im2));
    r.absErr = std::hypot(r.errRe, r.errIm);
    r.totalRate = units::rate_per_s(t.w / N);
    r.regime = classify_regime(scenario, target);
    r.bornValid = born_validity(scenario, target.experiment).valid;
    return r;
}

std::string_view to_string(ScaleKind kind)
{
    switch (kind) {
    case ScaleKind::xiMed: return "xiMed";
    case ScaleKind::xiRad: return "xiRad";
    case ScaleKind::unity: return "1";
    case ScaleKind::xiSep: return "xiSep";
    }
    return "1";
}

double limiting_coefficient(ScaleKind omega, ScaleKind phi)
{
    const bool sep = phi == ScaleKind::xiSep;
    if (!sep && phi != omega)
        throw ValidationError("phi", "must equal omega or be xiSep");
    switch (omega) {
    case ScaleKind::xiMed: return sep ? 1.61279 : 4.0 * std::erf(1.0);
    case ScaleKind::xiRad: return sep ? 9.92504 : 15.1686;
    case ScaleKind::unity: return sep ? 2.25982 : 5.88642;
    case ScaleKind::xiSep: break;
    }
    throw ValidationError("omega", "must be xiMed, xiRad or unity");
}

LimitingRate limiting_rate(const DMScenario& scenario, const Experiment& experiment,
                           double dominance)
{
    const auto g = dimensionless_groups(scenario, experiment);
    std::array<std::pair<double, ScaleKind>, 3> scales
        = {{{g.xiMed, ScaleKind::xiMed}, {g.xiRad, ScaleKind::xiRad}, {1.0, ScaleKind::unity}}};
    std::sort(scales.begin(), scales.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    if (scales[0].first < dominance * scales[1].first)
        throw MixedRegimeError("no dominant scale among xiMed, xiRad and 1");
    const double omega = scales[0].first;
    LimitingRate out;
    out.omega = scales[0].second;
    double phi;
    if (g.xiSep >= dominance * omega) {
        phi = omega;
        out.phi = out.omega;
    } else if (dominance * g.xiSep <= omega) {
        phi = g.xiSep;
        out.phi = ScaleKind::xiSep;
    } else {
        throw MixedRegimeError("separation comparable to the dominant scale");
    }
    out.Y = limiting_coefficient(out.omega, out.phi);
    const double N = experiment.nucleons;
    const double m2 = scenario.m * scenario.m;
    const double F = N * N * 4.0 * pi * scenario.alphaM * scenario.alphaDM * scenario.rhoDM
                     * scenario.M * scenario.vBar / (m2 * m2) * out.Y * phi * phi
                     / (omega * omega * omega * omega);
    out.rate = units::rate_per_s(F);
    out.regime = std::string("Omega=") + std::string(to_string(out.omega))
                 + ",Phi=" + std::string(to_string(out.phi));
    return out;
}

DecoherenceFactor decoherence_factor(std::complex<double> rate, double T)
{
    if (!(T > 0.0))
        throw ValidationError("T", "must be > 0");
    const cplx integral = rate * T;
    return {std::exp(-integral), integral.real(), integral.imag()};
}

DecoherenceFactor decoherence_factor(const std::vector<double>& times,
                                     const std::vector<std::complex<double>>& rates)
{
    if (times.size() != rates.size() || times.size() < 2)
        throw ValidationError("rates", "need at least two samples with matching times");
    cplx integral = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double dt = times[i] - times[i - 1];
        if (!(dt > 0.0))
            throw ValidationError("times", "must be strictly increasing");
        integral += 0.5 * dt * (rates[i] + rates[i - 1]);
    }
    return {std::exp(-integral), integral.real(), integral.imag()};
}

} // namespace dmdecoh
