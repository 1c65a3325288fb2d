// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
//
// The exit status is non-zero only when a criterion fails that is not listed in
// kKnownFailures; known failures still print FAIL together with the reason.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <dmdecoh/atmosphere.hpp>
#include <dmdecoh/born.hpp>
#include <dmdecoh/decoherence.hpp>
#include <dmdecoh/flux.hpp>
#include <dmdecoh/parallel.hpp>
#include <dmdecoh/sensitivity.hpp>
#include <dmdecoh/statistics.hpp>
#include <dmdecoh/units.hpp>

using namespace dmdecoh;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

struct Criterion
{
    int id;
    const char* name;
    double budgetSeconds;
    std::function<Outcome()> run;
};

// Criteria whose failure is understood and documented; see the README.
struct KnownFailure
{
    int id;
    const char* reason;
};
constexpr KnownFailure kKnownFailures[] = {
    {2, "Y(xiMed, xiSep) and Y(xiRad, xiSep) grow logarithmically with the dominant scale"},
    {10, "the closed-form estimate omits the (4 pi / 3) ln(lambda_med / dx) factor and the sidereal "
         "efficiency of the full rate"},
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int worker_count()
{
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

Experiment custom_target(double R_nm, double dx_nm, double N, double A = 1.0)
{
    Experiment e;
    e.name = "custom";
    e.radius = R_nm * units::nm;
    e.nucleons = N;
    e.massNumber = A;
    e.separation = dx_nm * units::nm;
    e.exposure = 1.0 * units::ms;
    e.countRate = 1.0;
    return e;
}

FluxModel space_flux(const DMScenario& sc)
{
    Site site;
    site.shielding = ShieldingMode::space;
    return FluxModel{sc, site, FluxMode::anisotropic, 0.0, 0.0};
}

// Least-squares slope of log y against log x.
double log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Composite Simpson rule on [a, b] with n (even) intervals.
template <class F>
double simpson(F&& f, double a, double b, int n)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// ---------------------------------------------------------------------------
// 1. Normalization

Outcome normalization()
{
    const double Z = speed_pdf_normalization(DMScenario::with_defaults(1e6, 1.0));
    return {std::abs(Z - 0.192) <= 0.001, fmt("Z = %.6f (target 0.192 +- 0.001)", Z)};
}

// ---------------------------------------------------------------------------
// 2. Limiting coefficients, evaluated from the limiting integrals.
//
// With x = Omega s C the master integral in a limiting regime reduces to
//   Y = Omega^4 / Phi^2 / pi * < s h(s) >
// over the untruncated Maxwellian with drift w = 1 along the separation, where
// h is an integral over x in [0, Omega s] of x g(x) times the kernel limit:
// 1 when the separation saturates, (s^2/8)(4 C^4 mu^2 + 2 C^2 (1 - C^2)(1 - mu^2))
// (the azimuth-averaged (q.dx)^2 / 2 divided by xiSep^2) when it is small.

enum class Kind
{
    med,
    rad,
    unity
};

double form_factor(double x)
{
    if (x < 1e-3)
        return 1.0 - x * x / 10.0;
    return 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

double shape(Kind k, double x)
{
    switch (k) {
    case Kind::med: return 1.0 / ((x * x + 1.0) * (x * x + 1.0));
    case Kind::rad: {
        const double f = form_factor(x);
        return f * f;
    }
    case Kind::unity: return 1.0;
    }
    return 0.0;
}

// Cumulative trapezoid tables of integral_0^X x^n g(x) dx for n = 1, 3, 5.
struct Moments
{
    double h;
    std::vector<double> c1, c3, c5;

    Moments(Kind k, double xmax, double h_) : h(h_)
    {
        const std::size_t n = static_cast<std::size_t>(xmax / h) + 2;
        c1.assign(n, 0.0);
        c3.assign(n, 0.0);
        c5.assign(n, 0.0);
        double prev[3] = {0, 0, 0};
        for (std::size_t i = 1; i < n; ++i) {
            const double x = i * h;
            const double g = shape(k, x);
            const double cur[3] = {x * g, x * x * x * g, x * x * x * x * x * g};
            c1[i] = c1[i - 1] + 0.5 * h * (prev[0] + cur[0]);
            c3[i] = c3[i - 1] + 0.5 * h * (prev[1] + cur[1]);
            c5[i] = c5[i - 1] + 0.5 * h * (prev[2] + cur[2]);
            std::copy(cur, cur + 3, prev);
        }
    }

    double at(const std::vector<double>& c, double X) const
    {
        const double t = X / h;
        const std::size_t i = std::min(static_cast<std::size_t>(t), c.size() - 2);
        const double f = t - static_cast<double>(i);
        return c[i] * (1.0 - f) + c[i + 1] * f;
    }
};

// Speed density and conditional <mu^2> of the drifted Maxwellian, by Simpson in mu.
void speed_moments(double s, double& p, double& mu2)
{
    auto w = [s](double mu) { return std::exp(-(s - mu) * (s - mu) - (1.0 - mu * mu)); };
    const double a = simpson(w, -1.0, 1.0, 200);
    const double b = simpson([&](double mu) { return mu * mu * w(mu); }, -1.0, 1.0, 200);
    p = 2.0 * pi * s * s * a / std::pow(pi, 1.5);
    mu2 = a > 0.0 ? b / a : 1.0 / 3.0;
}

double limiting_Y(Kind kind, bool smallSep, double Omega)
{
    const double sMax = 7.0;
    const double h = kind == Kind::rad ? 0.01 : 1e-3 * std::max(1.0, Omega / 1e3);
    const Moments mom(kind, Omega * sMax, h);
    auto integrand = [&](double s) {
        if (s <= 0.0)
            return 0.0;
        double p, mu2;
        speed_moments(s, p, mu2);
        const double X = Omega * s;
        const double pre = 8.0 * pi / (X * X);
        double hval;
        if (!smallSep) {
            hval = pre * mom.at(mom.c1, X);
        } else {
            const double par = 4.0 * mom.at(mom.c5, X) / std::pow(X, 4);
            const double perp = 2.0 * (mom.at(mom.c3, X) / (X * X) - mom.at(mom.c5, X) / std::pow(X, 4));
            hval = pre * s * s / 8.0 * (mu2 * par + (1.0 - mu2) * perp);
        }
        return p * s * hval;
    };
    const double avg = simpson(integrand, 0.0, sMax, 1400);
    const double Phi2 = smallSep ? 1.0 : Omega * Omega;
    return std::pow(Omega, 4) / Phi2 / pi * avg;
}

Outcome limiting_coefficients()
{
    struct Row
    {
        const char* label;
        Kind kind;
        bool smallSep;
        double reference;
    };
    const Row rows[] = {
        {"Y(xiMed,xiMed)", Kind::med, false, 3.3708},  {"Y(xiRad,xiRad)", Kind::rad, false, 15.1686},
        {"Y(1,1)", Kind::unity, false, 5.88642},       {"Y(xiMed,xiSep)", Kind::med, true, 1.61279},
        {"Y(xiRad,xiSep)", Kind::rad, true, 9.92504},  {"Y(1,xiSep)", Kind::unity, true, 2.25982},
    };
    bool pass = true;
    std::string detail;
    for (const auto& r : rows) {
        const bool unity = r.kind == Kind::unity;
        const double y4 = limiting_Y(r.kind, r.smallSep, unity ? 1.0 : 1e4);
        const double rel = std::abs(y4 / r.reference - 1.0);
        // Four significant figures.
        const bool ok = rel < 5e-4;
        pass = pass && ok;
        detail += fmt("%s=%.5g(%s)", r.label, y4, ok ? "ok" : "off");
        if (!unity) {
            const double y3 = limiting_Y(r.kind, r.smallSep, 1e3);
            detail += fmt("[Omega=1e3: %.5g]", y3);
        }
        detail += "; ";
    }
    return {pass, detail};
}

// ---------------------------------------------------------------------------
// 3. Quadrature against the Monte Carlo oracle in the four Sigma regimes.

Outcome quadrature_vs_oracle()
{
    std::mt19937_64 rng(2016);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto dex = [&](double lo, double hi) { return std::pow(10.0, lo + (hi - lo) * U(rng)); };
    const char* names[] = {"lambda^2/R", "lambda_med", "dx", "dx lambda^2/lambda_DM^2"};
    int failures = 0;
    double worst = 0.0;
    std::string detail;
    for (int regime = 0; regime < 4; ++regime) {
        for (int draw = 0; draw < 5; ++draw) {
            const double M = dex(4.0, 7.0);
            auto sc = DMScenario::with_defaults(M, 1.0);
            const double lDM = units::hbar_c_eV_nm / (M * sc.vBar); // nm
            double lMed, R, dx;
            switch (regime) {
            case 0:
                lMed = lDM * dex(-1.0, 1.0);
                R = std::max(lMed, lDM) * dex(1.0, 1.5);
                dx = R * dex(1.0, 1.5);
                break;
            case 1:
                R = lDM * dex(-1.0, 1.0);
                lMed = std::max(R, lDM) * dex(1.0, 1.5);
                dx = lMed * dex(1.0, 1.5);
                break;
            case 2:
                dx = lDM * dex(-1.0, 1.0);
                R = lDM * dex(-1.0, 1.0);
                lMed = std::max({dx, R, lDM}) * dex(1.0, 1.5);
                break;
            default:
                dx = lDM / dex(1.0, 1.5);
                R = lDM / dex(1.0, 1.5);
                lMed = lDM / dex(1.0, 1.5);
                break;
            }
            sc.m = units::hbar_c_eV_nm / lMed;
            const TargetModel target(custom_target(R, dx, std::round(dex(3.0, 6.0)), 10.0));
            Site site;
            FluxMode mode = FluxMode::anisotropic;
            switch (draw % 4) {
            case 0: site.shielding = ShieldingMode::space; break;
            case 1: site.shielding = ShieldingMode::absorbing_earth; break;
            case 2: site.shielding = ShieldingMode::reflecting_earth; break;
            default: mode = FluxMode::isotropized; break;
            }
            const FluxModel flux{sc, site, mode, 0.0, U(rng)};
            const double angle = pi * U(rng);
            const auto q = decoherence_rate(sc, target, flux, angle, {.relTol = 1e-4});
            const auto mc = decoherence_rate_mc(sc, target, flux, angle, 1'000'000,
                                                derive_seed(77, regime * 5 + draw), worker_count());
            const double bar = std::hypot(mc.errRe, q.absErr);
            const double dRe = std::abs(mc.rate.real() - q.rate.real());
            const double dIm = std::abs(mc.rate.imag() - q.rate.imag());
            const bool ok = dRe <= std::max(0.02 * q.rate.real(), 3.0 * bar)
                            && dIm <= std::max(0.02 * std::abs(q.rate), 3.0 * std::hypot(mc.errIm, q.absErr));
            worst = std::max(worst, dRe / q.rate.real());
            if (!ok) {
                ++failures;
                detail += fmt("[%s draw %d: q=%.4e mc=%.4e+-%.1e] ", names[regime], draw,
                              q.rate.real(), mc.rate.real(), mc.errRe);
            }
        }
    }
    return {failures == 0, fmt("%d/20 draws agree; worst Re deviation %.2f%% ", 20 - failures, 100 * worst) + detail};
}

// ---------------------------------------------------------------------------
// 4. Saturation and scaling

Outcome saturation_and_scaling()
{
    const auto sc = DMScenario::with_defaults(1e6, 100.0);
    const double k2 = 2.0 * sc.momentum();
    const double omega = std::max({k2 / sc.m, 1.0});
    const auto flux = space_flux(sc);

    // xiSep = 1e3 Omega.
    const double dxBig = 1e3 * omega / k2 / units::nm;
    const TargetModel big(custom_target(1e-6, dxBig, 1.0));
    const double re = decoherence_rate(sc, big, flux, 0.7).rate.real();
    const double tot = total_scattering_rate(sc, big, flux, 0.7);
    const double satErr = std::abs(re / tot - 1.0);

    // xiSep <= 1e-2 min(1, 1/xiMed, 1/xiRad).
    const double dxSmall = 1e-2 / omega / k2 / units::nm;
    std::vector<double> dxs, rates;
    for (double f : {0.25, 0.5, 1.0}) {
        dxs.push_back(f * dxSmall);
        rates.push_back(
            decoherence_rate(sc, TargetModel(custom_target(1e-6, f * dxSmall, 1.0)), flux, 0.7).rate.real());
    }
    const double quad = log_slope(dxs, rates);

    // Forward regime xiMed >> 1; dx = 100 eV^-1 keeps xiSep >= 100 xiMed at every speed.
    std::vector<double> vs, fr;
    for (double v : {100.0, 178.0, 316.0, 562.0, 1000.0}) {
        auto s = DMScenario::with_defaults(1e6, 1.0);
        s.vBar = v * units::km_s;
        s.vSun = s.vBar;
        s.vEsc = 550.0 / 230.0 * s.vBar;
        vs.push_back(v);
        fr.push_back(decoherence_rate(s, TargetModel(custom_target(1e-6, 100.0 / units::nm, 1.0)), space_flux(s), 0.7)
                         .rate.real());
    }
    const double vSlope = log_slope(vs, fr);

    std::vector<double> tr;
    const auto light = DMScenario::with_defaults(1e6, 1e-3);
    for (double v : vs)
        tr.push_back(transport_cross_section(light, light.M * v * units::km_s).closedForm);
    const double trSlope = log_slope(vs, tr);

    const bool pass = satErr <= 0.05 && std::abs(quad - 2.0) <= 0.05 && std::abs(vSlope + 1.0) <= 0.1
                      && std::abs(trSlope + 4.0) <= 0.1;
    return {pass, fmt("ReF/Gamma_tot-1 = %.4f; dx exponent %.4f; vBar exponent %.4f; sigma_tr exponent %.4f",
                      re / tot - 1.0, quad, vSlope, trSlope)};
}

// ---------------------------------------------------------------------------
// 5. Regime slopes of sensitivity curves

Outcome regime_slopes()
{
    // alphaHat ~ 1 / Sigma^2: slope +2 in m (-2 in lambda_med) when Sigma = lambda_med,
    // slope 0 when Sigma = dx.
    RunPlan kdtl{find_experiment("KDTL")};
    RunPlan otima{find_experiment("OTIMA")};
    SensitivityOptions opt;
    opt.threads = worker_count();
    const auto base = DMScenario::with_defaults(1e6, 1.0);

    auto slope_over = [&](const RunPlan& plan, double lo) {
        // Raw alphaHat: the Born mask of the published curve is a separate concern.
        const auto m = log_grid(lo, 10.0 * lo, 6);
        std::vector<double> a;
        for (double mediator : m) {
            auto sc = base;
            sc.m = mediator;
            a.push_back(critical_coupling(sc, plan, opt).alphaHat);
        }
        return log_slope(m, a);
    };
    // KDTL: R = 1 nm, dx = 266 nm, lambda_DM = 0.26 nm; lambda_med from 50 nm down to 5 nm.
    const double med = slope_over(kdtl, units::hbar_c_eV_nm / 50.0);
    // With Sigma = dx the rate keeps a factor ln(lambda_med / dx), so the slope is
    // 1 / ln(lambda_med / dx) and flattens only deep in the regime. OTIMA: dx = 78.5 nm.
    const double sep = slope_over(otima, 1e-7);
    const double sepShallow = slope_over(otima, 0.01);
    // The curve falls as lambda_med^-2, i.e. rises as m^2.
    const bool pass = std::abs(med - 2.0) <= 0.1 && std::abs(sep) <= 0.1;
    return {pass, fmt("Sigma=lambda_med (KDTL, m in [3.9, 39] eV): d ln alphaHat / d ln m = %.3f "
                      "(= %.3f vs lambda_med); Sigma=dx (OTIMA, m in [1e-7, 1e-6] eV): %.3f "
                      "[m in [0.01, 0.1] eV: %.3f]",
                      med, -med, sep, sepShallow)};
}

// ---------------------------------------------------------------------------
// 6. Statistics

Outcome statistics()
{
    const double B0 = 1e9;
    int bad = 0;
    double worstMean = 0, worstSd = 0, worstCov = 0;
    std::uint64_t cell = 0;
    for (double g : {0.2, 0.5, 0.8})
        for (double s : {0.001, 0.01, 0.05})
            for (double r : {0.0, 0.05, 0.1}) {
                const auto rep = simulate_replicas(s, g, B0, r * B0, 10000, derive_seed(6, cell++),
                                                   worker_count());
                const double sd = estimator_stddev(B0, g, s, r * B0).full;
                const double em = std::abs(rep.mean / s - 1.0);
                const double es = std::abs(rep.stddev / sd - 1.0);
                const double ec = std::abs(rep.coverage - 0.95);
                worstMean = std::max(worstMean, em);
                worstSd = std::max(worstSd, es);
                worstCov = std::max(worstCov, ec);
                if (em > 0.05 || es > 0.05 || ec > 0.01 || rep.degenerate)
                    ++bad;
            }
    return {bad == 0, fmt("27 cells x 1e4 replicas; worst |mean/s-1| %.4f, |sd/sd_full-1| %.4f, "
                          "|coverage-0.95| %.4f",
                          worstMean, worstSd, worstCov)};
}

// ---------------------------------------------------------------------------
// 7. Square well

Outcome square_well()
{
    const double M = 1.0, R = 1.0;
    double sw = 0, born = 0;
    for (double g : {0.1, 0.5, 1.0, 2.0}) {
        const SquareWell well{g * g / (2.0 * M * R * R), R};
        for (double kR : {0.001, 0.01, 0.049})
            sw = std::max(sw, std::abs(square_well_exact_sigma(well, kR / R, M)
                                           / square_well_s_wave_sigma(well, M) - 1.0));
    }
    for (double g : {0.05, 0.15, 0.29})
        for (double sign : {1.0, -1.0}) {
            const SquareWell well{sign * g * g / (2.0 * M * R * R), R};
            for (double kR : {0.01, 0.1, 0.29})
                born = std::max(born, std::abs(square_well_exact_sigma(well, kR / R, M)
                                                   / square_well_born_sigma(well, kR / R, M) - 1.0));
        }
    const double hard = square_well_exact_sigma({1e10, R}, 0.01 / R, M) / (4.0 * pi * R * R);
    const bool pass = sw <= 0.01 && born <= 0.10 && std::abs(hard - 1.0) <= 0.02;
    return {pass, fmt("s-wave worst %.2e; Born worst %.3f; hard sphere sigma/4piR^2 = %.5f", sw, born, hard)};
}

// ---------------------------------------------------------------------------
// 8. Random walk

Outcome random_walk()
{
    const std::int64_t W = 100000;
    bool pass = true;
    std::string detail;
    std::uint64_t seed = 8;
    for (auto [n, m] : {std::pair{1, 4}, std::pair{3, 5}, std::pair{6, 2}}) {
        const auto t = simulate_absorbing_walk(n, m, W, seed++, worker_count());
        const double p = double(m) / (n + m);
        const double z = (t.near_fraction() - p) / std::sqrt(p * (1 - p) / W);
        pass = pass && std::abs(z) <= 3.0;
        detail += fmt("(%d,%d): %.4f vs %.4f z=%.2f; ", n, m, t.near_fraction(), p, z);
    }
    // zeta_iso of a physical scenario, with the coupling chosen inside the ground-reach range.
    auto sc = DMScenario::with_defaults(1e6, 1.0);
    sc.alphaM = threshold_couplings(sc).alphaIso / 0.0625;
    const double zeta = shielding_thresholds(sc).zetaIso;
    const double reach = simulate_ground_reach(zeta, W, seed, worker_count());
    const double z = (reach - zeta) / std::sqrt(zeta * (1 - zeta) / W);
    pass = pass && std::abs(z) <= 3.0;
    detail += fmt("ground reach %.4f vs zeta_iso %.4f z=%.2f", reach, zeta, z);
    return {pass, detail};
}

// ---------------------------------------------------------------------------
// 9. Sidereal daily variation

Outcome daily_variation_shape()
{
    const auto& otima = find_experiment("OTIMA");
    Site site; // 48 N, axis horizontal at 70 deg from north, wind from +38 deg declination
    const int P = 96;
    const auto phases = sidereal_grid(P);
    auto wrap = [](double x) { return x - std::round(x); };

    bool pass = true;
    std::string detail;
    for (auto [M, m] : {std::pair{1e3, 200.0}, std::pair{1e6, 20.0}}) {
        const auto sc = DMScenario::with_defaults(M, m);
        std::vector<double> flux(P), rate(P);
        for (int i = 0; i < P; ++i) {
            flux[i] = horizon_flux_fraction(sc, site, phases[i]).downward;
            const FluxModel f{sc, site, FluxMode::anisotropic, 0.0, phases[i]};
            rate[i] = decoherence_rate(sc, TargetModel(otima), f, 0.0, {.relTol = 1e-4}).rate.real();
        }
        int maxima = 0;
        for (int i = 0; i < P; ++i)
            if (flux[i] > flux[(i + P - 1) % P] && flux[i] >= flux[(i + 1) % P])
                ++maxima;
        const int iMax = int(std::max_element(flux.begin(), flux.end()) - flux.begin());
        const int iMin = int(std::min_element(flux.begin(), flux.end()) - flux.begin());
        const double gapHours = 24.0 * std::abs(wrap((iMin - iMax) / double(P)));
        const double eta = daily_variation(SiderealSeries{phases, rate});
        const double offset = wrap(fundamental_phase(rate) - fundamental_phase(flux));
        const bool heavy = M > 1e5;
        // "Nonzero" means at least a hundredth of a cycle (about 14 minutes).
        const bool offsetOk = heavy ? std::abs(offset) < 0.01 : std::abs(offset) >= 0.01;
        const bool ok = maxima == 1 && std::abs(gapHours - 12.0) <= 1.0 && eta >= 0.3 && eta <= 0.7
                        && offsetOk;
        pass = pass && ok;
        detail += fmt("M=%g m=%g: %d max, min %.2f h after max, eta %.3f, rate-flux offset %.4f cycles; ",
                      M, m, maxima, gapHours, eta, offset);
    }
    return {pass, detail};
}

// ---------------------------------------------------------------------------
// 10. Order-of-magnitude curve checks

Outcome order_of_magnitude()
{
    RunPlan plan{find_experiment("OTIMA")};
    const auto& e = plan.experiment;
    const Threshold th = detection_threshold(plan);
    SensitivityOptions opt;
    double worst = 1.0;
    std::string ratios;
    for (double m : log_grid(0.01, 0.2, 4)) {
        auto sc = DMScenario::with_defaults(1e6, m);
        const double lMed = 1.0 / m;
        // Sigma = dx requires lambda_med >> max(dx, R, lambda_DM).
        if (lMed < 10.0 * std::max({e.separation, e.radius, 1.0 / sc.momentum()}))
            continue;
        const double inv = th.chi * e.exposure * e.nucleons * e.nucleons * sc.alphaDM * sc.rhoDM
                           / sc.momentum() * e.separation * e.separation;
        const double estimate = 1.0 / inv;
        const double full = critical_coupling(sc, plan, opt).alphaHat;
        const double r = full / estimate;
        worst = std::max(worst, std::max(r, 1.0 / r));
        ratios += fmt("%.3g ", r);
    }
    const bool otimaBackground = th.background > th.sigma;
    RunPlan pino{find_experiment("Pino")};
    const Threshold tp = detection_threshold(pino);
    const bool pinoStats = tp.sigma > tp.background;
    const bool pass = worst <= 3.0 && otimaBackground && pinoStats;
    return {pass, fmt("OTIMA 1 MeV alphaHat / estimate = [ %s] (factor %.2f); OTIMA sigma %.2e vs "
                      "background %.2e; Pino sigma %.2e vs background %.2e",
                      ratios.c_str(), worst, th.sigma, th.background, tp.sigma, tp.background)};
}

// ---------------------------------------------------------------------------
// 11. Greenhouse

Outcome greenhouse()
{
    // Forward regime: light mediator.
    const double m = 1e-3;
    auto ratio2 = [](const DMScenario& s) {
        const double r = s.M * s.vBar * s.vBar / 3.0 / (300.0 * units::kelvin);
        return r * r;
    };
    const auto mev = DMScenario::with_defaults(1e6, m);
    const double eMeV = greenhouse_enhancement(mev);
    const auto kev = DMScenario::with_defaults(120e3, m);
    const double eKeV = greenhouse_enhancement(kev);
    const double e37 = greenhouse_enhancement(DMScenario::with_defaults(37e6, m));
    const double e100 = greenhouse_enhancement(DMScenario::with_defaults(1e8, m));
    // Pinned tolerance: 25 % around the forward-regime scaling and the quoted values.
    const bool pass = std::abs(eMeV / ratio2(mev) - 1.0) <= 0.25 && std::abs(eMeV / 64.0 - 1.0) <= 0.25
                      && std::abs(eKeV - 1.0) <= 0.25 && e37 == 0.0 && e100 == 0.0;
    return {pass, fmt("1 MeV: %.2f (scaling %.2f, quoted 64); 120 keV: %.3f; 37 MeV: %g; 100 MeV: %g",
                      eMeV, ratio2(mev), eKeV, e37, e100)};
}

} // namespace

// Optional arguments select criteria by number.
int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria = {
        {1, "normalization", 1.0, normalization},
        {2, "limiting coefficients", 60.0, limiting_coefficients},
        {3, "quadrature vs Monte Carlo oracle", 600.0, quadrature_vs_oracle},
        {4, "saturation and scaling", 600.0, saturation_and_scaling},
        {5, "regime slopes", 1200.0, regime_slopes},
        {6, "statistics", 300.0, statistics},
        {7, "square well", 60.0, square_well},
        {8, "random walk", 60.0, random_walk},
        {9, "sidereal daily variation", 600.0, daily_variation_shape},
        {10, "order-of-magnitude curve checks", 600.0, order_of_magnitude},
        {11, "greenhouse", 60.0, greenhouse},
    };
    std::vector<int> only;
    for (int i = 1; i < argc; ++i)
        only.push_back(std::atoi(argv[i]));
    int unexpected = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt > c.budgetSeconds) {
            o.pass = false;
            o.detail += fmt(" [over runtime budget %.0f s]", c.budgetSeconds);
        }
        const char* known = nullptr;
        for (const auto& k : kKnownFailures)
            if (k.id == c.id)
                known = k.reason;
        std::printf("[%2d] %-34s %s  (%.1f s) %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", dt,
                    o.detail.c_str());
        if (!o.pass && known)
            std::printf("     known failure: %s\n", known);
        if (!o.pass && !known)
            ++unexpected;
        std::fflush(stdout);
    }
    return unexpected == 0 ? 0 : 1;
}
