#include "dmdecoh/flux.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "dmdecoh/errors.hpp"
#include "dmdecoh/quadrature.hpp"
#include "dmdecoh/special.hpp"

namespace dmdecoh {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double deg = pi / 180.0;

// Speeds beyond w + 8 carry weight below exp(-64).
constexpr double kTailWidth = 8.0;

double spherical_i0_scaled(double x)
{
    return x < 1e-8 ? 1.0 - x : -std::expm1(-2.0 * x) / (2.0 * x);
}

Vec3 gaussian_vec(std::mt19937_64& rng, double sigma)
{
    std::normal_distribution<double> n(0.0, sigma);
    const double x = n(rng);
    const double y = n(rng);
    const double z = n(rng);
    return {x, y, z};
}

Vec3 uniform_direction(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double cz = 2.0 * u(rng) - 1.0;
    const double phi = 2.0 * pi * u(rng);
    const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
    return {sz * std::cos(phi), sz * std::sin(phi), cz};
}

} // namespace

FluxMode parse_flux_mode(std::string_view text)
{
    if (text == "anisotropic")
        return FluxMode::anisotropic;
    if (text == "isotropized")
        return FluxMode::isotropized;
    if (text == "thermalized")
        return FluxMode::thermalized;
    throw ValidationError("mode", "expected anisotropic, isotropized or thermalized");
}

std::string_view to_string(FluxMode mode)
{
    switch (mode) {
    case FluxMode::anisotropic: return "anisotropic";
    case FluxMode::isotropized: return "isotropized";
    case FluxMode::thermalized: return "thermalized";
    }
    return "anisotropic";
}

void FluxModel::validate() const
{
    scenario.validate();
    site.validate();
    if (mode == FluxMode::thermalized && !(temperature > 0.0 && std::isfinite(temperature)))
        throw ValidationError("flux.temperature", "must be > 0 in thermalized mode");
    if (!std::isfinite(siderealPhase))
        throw ValidationError("flux.siderealPhase", "must be finite");
}

double speed_pdf_normalization(const DMScenario& scenario)
{
    scenario.validate();
    const double w = scenario.vSun / scenario.vBar;
    const double ue = scenario.vEsc / scenario.vBar;
    // Angular integral done analytically: pi u e^{-(u-w)^2} (1 - e^{-4uw}) / w.
    auto f = [w](double u) {
        const double ang = w > 0.0 ? -std::expm1(-4.0 * u * w) / w : 4.0 * u;
        return pi * u * std::exp(-(u - w) * (u - w)) * ang;
    };
    const double hi = std::min(ue, w + kTailWidth);
    const auto pts = quad::breakpoints(0.0, hi, {w, w - 2.0, w + 2.0});
    const auto r = quad::integrate<double>(f, std::span<const double>(pts),
                                           {.rel_tol = 1e-12, .abs_tol = 0.0, .max_intervals = 500});
    return 1.0 / r.value;
}

LabFrame lab_frame(const Site& site, double siderealPhase)
{
    const double lst = 2.0 * pi * siderealPhase;
    const double phi = site.latitude * deg;
    const Vec3 zenith{std::cos(phi) * std::cos(lst), std::cos(phi) * std::sin(lst), std::sin(phi)};
    const Vec3 east{-std::sin(lst), std::cos(lst), 0.0};
    const Vec3 north{-std::sin(phi) * std::cos(lst), -std::sin(phi) * std::sin(lst), std::cos(phi)};
    const double A = site.axisAzimuth * deg;
    const double h = site.axisAltitude * deg;
    const Vec3 axis = (north * std::cos(A) + east * std::sin(A)) * std::cos(h) + zenith * std::sin(h);
    const double dec = site.windDeclination * deg;
    const Vec3 source{std::cos(dec), 0.0, std::sin(dec)};
    return {zenith, normalized(axis), -source};
}

DirectionalDensity::DirectionalDensity(const FluxModel& model, double windAngle)
    : mode_(model.mode)
{
    model.validate();
    const auto& sc = model.scenario;
    if (model.mode == FluxMode::thermalized) {
        kind_ = Kind::isotropic;
        thermal_ = true;
        a_ = std::sqrt(2.0 * model.temperature / sc.M) / sc.vBar;
        sMax_ = 10.0 * a_;
        return;
    }
    Z_ = speed_pdf_normalization(sc);
    w_ = sc.vSun / sc.vBar;
    sMax_ = std::min(sc.vEsc / sc.vBar, w_ + kTailWidth);
    maskedHalo_ = model.masked();
    reflect_ = model.site.shielding == ShieldingMode::reflecting_earth;
    if (maskedHalo_) {
        const LabFrame f = lab_frame(model.site, model.siderealPhase);
        axis_ = f.axis;
        windDir_ = f.wind;
        up_ = f.zenith;
    } else {
        axis_ = {0.0, 0.0, 1.0};
        windDir_ = {std::sin(windAngle), 0.0, std::cos(windAngle)};
    }
    e1_ = orthogonal(axis_);
    e2_ = cross(axis_, e1_);
    if (model.mode == FluxMode::isotropized)
        kind_ = Kind::isotropic;
    else
        kind_ = maskedHalo_ ? Kind::masked : Kind::unmasked;
}

std::vector<double> DirectionalDensity::s_breaks() const
{
    if (thermal_)
        return quad::breakpoints(0.0, sMax_, {a_, 2.0 * a_, 4.0 * a_});
    return quad::breakpoints(0.0, sMax_, {w_, w_ + 2.0, w_ - 1.0, w_ + 1.0});
}

std::vector<double> DirectionalDensity::c_breaks() const
{
    if (kind_ != Kind::masked)
        return {-1.0, 1.0};
    const double rho = std::hypot(dot(up_, e1_), dot(up_, e2_));
    return quad::breakpoints(-1.0, 1.0, {-rho, rho});
}

double DirectionalDensity::halo_total_down(double s) const
{
    const auto& gl = quad::gauss_legendre(48);
    const double muw = dot(windDir_, up_);
    const double rw = std::sqrt(std::max(0.0, 1.0 - muw * muw));
    const double x = 2.0 * s * w_;
    auto f = [&](double mu) {
        const double E = x * std::sqrt(std::max(0.0, 1.0 - mu * mu)) * rw;
        return std::exp(-s * s - w_ * w_ + x * mu * muw + E) * special::bessel_i0_scaled(E);
    };
    return 2.0 * pi * Z_ * quad::fixed_gl<double>(f, -1.0, 0.0, gl);
}

double DirectionalDensity::reflected(double s) const
{
    if (!reflect_)
        return 0.0;
    const auto& gl = quad::gauss_legendre(48);
    const double muw = dot(windDir_, up_);
    const double rw = std::sqrt(std::max(0.0, 1.0 - muw * muw));
    const double x = 2.0 * s * w_;
    auto f = [&](double mu) {
        const double E = x * std::sqrt(std::max(0.0, 1.0 - mu * mu)) * rw;
        return -mu * std::exp(-s * s - w_ * w_ + x * mu * muw + E) * special::bessel_i0_scaled(E);
    };
    // (1/pi) * 2 pi Z * integral of |mu| n over the downward hemisphere.
    return 2.0 * Z_ * quad::fixed_gl<double>(f, -1.0, 0.0, gl);
}

double DirectionalDensity::total(double s) const
{
    if (thermal_) {
        const double norm = std::pow(pi * a_ * a_, -1.5);
        return 4.0 * pi * norm * std::exp(-(s * s) / (a_ * a_));
    }
    if (!maskedHalo_)
        return 4.0 * pi * Z_ * std::exp(-(s - w_) * (s - w_)) * spherical_i0_scaled(2.0 * s * w_);
    double t = halo_total_down(s);
    if (reflect_)
        t += 2.0 * pi * reflected(s);
    return t;
}

double DirectionalDensity::angular(double s, double c) const
{
    return angular(s, c, kind_ == Kind::masked && reflect_ ? reflected(s) : 0.0);
}

double DirectionalDensity::angular(double s, double c, double reflectedAtS) const
{
    switch (kind_) {
    case Kind::isotropic: return 0.5 * total(s);
    case Kind::unmasked: {
        const double cw = dot(windDir_, axis_);
        const double sc = std::sqrt(std::max(0.0, 1.0 - c * c));
        const double sw = std::sqrt(std::max(0.0, 1.0 - cw * cw));
        const double E = 2.0 * s * w_ * sc * sw;
        return 2.0 * pi * Z_ * std::exp(-s * s - w_ * w_ + 2.0 * s * w_ * c * cw + E)
               * special::bessel_i0_scaled(E);
    }
    case Kind::masked: {
        double arc = 0.0;
        const double down = Z_ * down_arc_integral(s, c, &arc);
        return down + (reflect_ ? reflectedAtS * (2.0 * pi - arc) : 0.0);
    }
    }
    return 0.0;
}

double DirectionalDensity::down_arc_integral(double s, double c, double* arcLength) const
{
    const double S = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double ue = dot(up_, axis_);
    const double ua = dot(up_, e1_);
    const double ub = dot(up_, e2_);
    const double rhoU = std::hypot(ua, ub);
    const double we = dot(windDir_, axis_);
    const double wa = dot(windDir_, e1_);
    const double wb = dot(windDir_, e2_);
    const double rhoW = std::hypot(wa, wb);
    const double psiW = std::atan2(wb, wa);
    const double E = 2.0 * s * w_ * S * rhoW;
    const double base = -s * s - w_ * w_ + 2.0 * s * w_ * c * we + E;

    // Downward-moving set: S rhoU cos(psi - psiU) < -c ue.
    double lo = 0.0;
    double len = 0.0;
    const double lhs = S * rhoU;
    if (lhs < 1e-14) {
        len = c * ue < 0.0 ? 2.0 * pi : 0.0;
    } else {
        const double t = -c * ue / lhs;
        if (t >= 1.0) {
            len = 2.0 * pi;
        } else if (t > -1.0) {
            const double th = std::acos(t);
            lo = std::atan2(ub, ua) + th;
            len = 2.0 * pi - 2.0 * th;
        }
    }
    *arcLength = len;
    if (len <= 0.0)
        return 0.0;
    if (len >= 2.0 * pi)
        return 2.0 * pi * std::exp(base) * special::bessel_i0_scaled(E);

    // Split the arc at the peak of the exponential, if it lies inside.
    const double hi = lo + len;
    double peak = psiW;
    while (peak < lo)
        peak += 2.0 * pi;
    while (peak >= lo + 2.0 * pi)
        peak -= 2.0 * pi;
    std::array<double, 3> edges = {lo, hi, hi};
    int nEdges = 2;
    if (peak > lo && peak < hi) {
        edges = {lo, peak, hi};
        nEdges = 3;
    }
    const auto& gl = quad::gauss_legendre(32);
    auto f = [&](double psi) { return std::exp(E * (std::cos(psi - psiW) - 1.0)); };
    double sum = 0.0;
    for (int i = 0; i + 1 < nEdges; ++i)
        sum += quad::fixed_gl<double>(f, edges[i], edges[i + 1], gl);
    return std::exp(base) * sum;
}

namespace {

struct ShieldedIntegrals
{
    double full = 0.0;
    double down = 0.0;
    double reflected = 0.0;
};

ShieldedIntegrals shielded_moments(const DMScenario& scenario, const Site& site,
                                   double siderealPhase, int power)
{
    FluxModel model{scenario, site, FluxMode::anisotropic, 0.0, siderealPhase};
    Site open = site;
    open.shielding = ShieldingMode::space;
    FluxModel free{scenario, open, FluxMode::anisotropic, 0.0, siderealPhase};
    Site reflecting = site;
    reflecting.shielding = ShieldingMode::reflecting_earth;
    model.site = reflecting;
    const DirectionalDensity masked(model, 0.0);
    const DirectionalDensity unmasked(free, 0.0);
    const auto pts = masked.s_breaks();
    const quad::Options opt{.rel_tol = 1e-9, .abs_tol = 0.0, .max_intervals = 400};
    auto pw = [power](double s) { return std::pow(s, power); };
    ShieldedIntegrals out;
    out.full = quad::integrate<double>([&](double s) { return pw(s) * unmasked.total(s); },
                                       std::span<const double>(pts), opt)
                   .value;
    out.down = quad::integrate<double>(
                   [&](double s) { return pw(s) * (masked.total(s) - 2.0 * pi * masked.reflected(s)); },
                   std::span<const double>(pts), opt)
                   .value;
    out.reflected = quad::integrate<double>(
                        [&](double s) { return pw(s) * 2.0 * pi * masked.reflected(s); },
                        std::span<const double>(pts), opt)
                        .value;
    return out;
}

} // namespace

HorizonFraction horizon_flux_fraction(const DMScenario& scenario, const Site& site,
                                      double siderealPhase)
{
    if (site.shielding == ShieldingMode::space)
        return {1.0, 0.0};
    const auto m = shielded_moments(scenario, site, siderealPhase, 3);
    HorizonFraction f{m.down / m.full, 0.0};
    if (site.shielding == ShieldingMode::reflecting_earth)
        f.reflected = m.reflected / m.full;
    return f;
}

HorizonFraction horizon_density_fraction(const DMScenario& scenario, const Site& site,
                                         double siderealPhase)
{
    if (site.shielding == ShieldingMode::space)
        return {1.0, 0.0};
    const auto m = shielded_moments(scenario, site, siderealPhase, 2);
    HorizonFraction f{m.down / m.full, 0.0};
    if (site.shielding == ShieldingMode::reflecting_earth)
        f.reflected = m.reflected / m.full;
    return f;
}

MomentumSampler::MomentumSampler(const FluxModel& model, double windAngle) : model_(model)
{
    model.validate();
    const auto& sc = model.scenario;
    w_ = sc.vSun / sc.vBar;
    uEsc_ = sc.vEsc / sc.vBar;
    masked_ = model.masked();
    if (masked_) {
        const LabFrame f = lab_frame(model.site, model.siderealPhase);
        axis_ = f.axis;
        windDir_ = f.wind;
        up_ = f.zenith;
        if (model.site.shielding == ShieldingMode::reflecting_earth) {
            const auto d = horizon_density_fraction(sc, model.site, model.siderealPhase);
            reflectProb_ = d.reflected / d.total();
        }
    } else {
        axis_ = {0.0, 0.0, 1.0};
        windDir_ = {std::sin(windAngle), 0.0, std::cos(windAngle)};
    }
}

Vec3 MomentumSampler::halo_velocity(std::mt19937_64& rng) const
{
    for (;;) {
        const Vec3 v = windDir_ * w_ + gaussian_vec(rng, std::sqrt(0.5));
        if (norm(v) < uEsc_)
            return v;
    }
}

Vec3 MomentumSampler::shielded_velocity(std::mt19937_64& rng) const
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (reflectProb_ > 0.0 && u(rng) < reflectProb_) {
        // Lambertian re-emission: speed from the flux-weighted downward population,
        // direction uniform over the upper hemisphere.
        for (;;) {
            const Vec3 v = halo_velocity(rng);
            const double speed = norm(v);
            const double mu = dot(v, up_) / speed;
            if (mu < 0.0 && u(rng) < -mu) {
                Vec3 d = uniform_direction(rng);
                if (dot(d, up_) < 0.0)
                    d = -d;
                return d * speed;
            }
        }
    }
    for (;;) {
        const Vec3 v = halo_velocity(rng);
        if (dot(v, up_) < 0.0)
            return v;
    }
}

Vec3 MomentumSampler::operator()(std::mt19937_64& rng) const
{
    const auto& sc = model_.scenario;
    const double k0 = sc.M * sc.vBar;
    if (model_.mode == FluxMode::thermalized) {
        const double sigma = std::sqrt(model_.temperature / sc.M) / sc.vBar;
        return gaussian_vec(rng, sigma) * k0;
    }
    const Vec3 v = masked_ ? shielded_velocity(rng) : halo_velocity(rng);
    if (model_.mode == FluxMode::isotropized)
        return uniform_direction(rng) * (norm(v) * k0);
    return v * k0;
}

Vec3 sample_momentum(const FluxModel& model, std::uint64_t seed, double windAngle)
{
    std::mt19937_64 rng(seed);
    return MomentumSampler(model, windAngle)(rng);
}

void SiderealSeries::validate() const
{
    if (values.empty() || values.size() != times.size())
        throw DegenerateDataError("sidereal series is empty or has mismatched columns");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ValidationError("series.times", "must be strictly increasing");
}

double SiderealSeries::mean() const
{
    validate();
    double sum = 0.0;
    for (double v : values)
        sum += v;
    return sum / values.size();
}

double SiderealSeries::half_peak_to_peak() const
{
    validate();
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return 0.5 * (*hi - *lo);
}

double daily_variation(const SiderealSeries& series)
{
    series.validate();
    const auto [lo, hi] = std::minmax_element(series.values.begin(), series.values.end());
    if (!(*hi + *lo > 0.0))
        throw DegenerateDataError("daily variation of an all-zero series is undefined");
    return (*hi - *lo) / (*hi + *lo);
}

std::vector<double> sidereal_grid(int points)
{
    if (points < 1)
        throw ValidationError("points", "must be >= 1");
    std::vector<double> t(points);
    for (int i = 0; i < points; ++i)
        t[i] = double(i) / points;
    return t;
}

} // namespace dmdecoh
