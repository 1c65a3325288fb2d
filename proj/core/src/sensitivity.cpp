#include "dmdecoh/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dmdecoh/born.hpp"
#include "dmdecoh/errors.hpp"
#include "dmdecoh/parallel.hpp"
#include "dmdecoh/units.hpp"

namespace dmdecoh {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double inf = std::numeric_limits<double>::infinity();

/// Mean speed of the untruncated shifted Maxwellian, in units of vBar.
double halo_mean_speed(double w)
{
    if (w < 1e-6)
        return 2.0 / std::sqrt(std::numbers::pi);
    return (w + 0.5 / w) * std::erf(w) + std::exp(-w * w) / std::sqrt(std::numbers::pi);
}

std::complex<double> averaged_rate(const DMScenario& sc, const TargetModel& target,
                                   FluxModel flux, const SensitivityOptions& opt)
{
    RateOptions ro;
    ro.relTol = opt.relTol;
    // Only the horizon mask depends on sidereal time.
    if (!flux.masked() || flux.mode == FluxMode::thermalized)
        return decoherence_rate(sc, target, flux, opt.windAngle, ro).rate;
    const int n = std::max(1, opt.phases);
    std::complex<double> sum = 0.0;
    for (int i = 0; i < n; ++i) {
        flux.siderealPhase = static_cast<double>(i) / n;
        sum += decoherence_rate(sc, target, flux, opt.windAngle, ro).rate;
    }
    return sum / static_cast<double>(n);
}

FluxModel make_flux(const DMScenario& sc, const SensitivityOptions& opt, bool space)
{
    FluxModel flux{sc, opt.site, opt.mode, 0.0, 0.0};
    if (space)
        flux.site.shielding = ShieldingMode::space;
    if (opt.mode == FluxMode::thermalized)
        flux.temperature = opt.atmosphere.TAtm * units::kelvin;
    return flux;
}

/// Rate at alphaM = 1 of the crust-thermalized population, scaled to its density.
std::complex<double> greenhouse_rate(const DMScenario& sc, const TargetModel& target,
                                     const SensitivityOptions& opt)
{
    const double E = greenhouse_enhancement(sc, opt.atmosphere);
    if (E == 0.0)
        return 0.0;
    FluxModel th{sc, opt.site, FluxMode::thermalized, opt.atmosphere.TCrust * units::kelvin, 0.0};
    RateOptions ro;
    ro.relTol = opt.relTol;
    const auto F = decoherence_rate(sc, target, th, 0.0, ro).rate;
    // Number flux E relative to the halo; density follows flux / mean speed.
    const double vHalo = sc.vBar * halo_mean_speed(sc.vSun / sc.vBar);
    const double vTh = std::sqrt(8.0 * opt.atmosphere.TCrust * units::kelvin
                                 / (std::numbers::pi * sc.M));
    return E * (vHalo / vTh) * F;
}

double coupling_from(double threshold, double etaTimesT, double rate)
{
    const double pilot = etaTimesT * rate;
    if (!(pilot > 0.0))
        return inf;
    return threshold / pilot;
}

} // namespace

double Overlay::limit(double mediator) const
{
    if (m.size() < 2 || mediator < m.front() || mediator > m.back())
        return inf;
    const auto it = std::upper_bound(m.begin(), m.end(), mediator);
    const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - m.begin()), m.size() - 1);
    const std::size_t i = j - 1;
    const double t = std::log(mediator / m[i]) / std::log(m[j] / m[i]);
    return std::exp((1.0 - t) * std::log(alpha[i]) + t * std::log(alpha[j]));
}

RunPlan effective_plan(const RunPlan& plan)
{
    RunPlan p = plan;
    if (plan.experiment.space) {
        p.etaDM = 1.0;
        p.etaRes = 0.0;
    }
    return p;
}

std::complex<double> pilot_rate(const DMScenario& scenario, const Experiment& experiment,
                                const SensitivityOptions& options)
{
    DMScenario unit = scenario;
    unit.alphaM = 1.0;
    const TargetModel target(experiment);
    return averaged_rate(unit, target, make_flux(unit, options, experiment.space), options);
}

CriticalCoupling critical_coupling(const DMScenario& scenario, const RunPlan& plan,
                                   const SensitivityOptions& options)
{
    const RunPlan p = effective_plan(plan);
    p.validate();
    const double T = p.experiment.exposure * units::hbar_eV_s; // [s]
    CriticalCoupling out;
    out.threshold = detection_threshold(p).threshold;
    const double re = pilot_rate(scenario, p.experiment, options).real();
    out.pilot = p.etaDM * re * T;
    if (!(out.pilot > 0.0))
        throw DegenerateDataError("critical coupling: pilot decoherence is zero");
    out.alphaHat = out.threshold / out.pilot;
    if (options.verifyLinearity) {
        DMScenario at = scenario;
        at.alphaM = 1.0;
        auto s_of = [&](double log10a) {
            at.alphaM = std::pow(10.0, log10a);
            const TargetModel target(p.experiment);
            const auto F = averaged_rate(at, target, make_flux(at, options, p.experiment.space),
                                         options);
            return p.etaDM * F.real() * T;
        };
        double lo = -30.0, hi = 0.0;
        if (s_of(hi) < out.threshold) {
            hi = std::log10(out.alphaHat) + 1.0;
        }
        // Bisection on log10 alphaM to 1e-3 dex.
        while (hi - lo > 1e-3) {
            const double mid = 0.5 * (lo + hi);
            if (s_of(mid) < out.threshold)
                lo = mid;
            else
                hi = mid;
        }
        const double root = std::pow(10.0, 0.5 * (lo + hi));
        out.linearityError = std::abs(root / out.alphaHat - 1.0);
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, int points)
{
    if (!(lo > 0.0) || !(hi >= lo))
        throw ValidationError("m-grid", "need 0 < lo <= hi");
    if (points < 1)
        throw ValidationError("m-grid", "need at least one point");
    std::vector<double> g(static_cast<std::size_t>(points));
    if (points == 1) {
        g[0] = lo;
        return g;
    }
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < points; ++i)
        g[i] = std::pow(10.0, a + (b - a) * i / (points - 1));
    return g;
}

SensitivityCurve sweep_curve(const RunPlan& plan, const DMScenario& base,
                             const std::vector<double>& mGrid,
                             const SensitivityOptions& options)
{
    if (mGrid.empty())
        throw ValidationError("m-grid", "must not be empty");
    const RunPlan p = effective_plan(plan);
    p.validate();
    const bool space = p.experiment.space;
    const double T = p.experiment.exposure * units::hbar_eV_s;
    const double threshold = detection_threshold(p).threshold;

    std::vector<double> grid = mGrid;
    std::sort(grid.begin(), grid.end());
    SensitivityCurve curve;
    curve.experimentName = p.experiment.name;
    curve.M = base.M;
    curve.rows.resize(grid.size());

    SensitivityOptions inner = options;
    inner.threads = 1;
    parallel_for(grid.size(), options.threads, [&](std::size_t i) {
        DMScenario sc = base;
        sc.m = grid[i];
        sc.alphaM = 1.0;
        SensitivityRow row;
        row.m = grid[i];
        const TargetModel target(p.experiment);
        const auto F = averaged_rate(sc, target, make_flux(sc, inner, space), inner);
        const double alphaHat = coupling_from(threshold, p.etaDM * T, F.real());

        const auto th = threshold_couplings(sc, options.atmosphere);
        row.alphaScatt = th.alphaScatt;
        row.alphaIso = th.alphaIso;
        row.alphaTherm = th.alphaTherm;

        DMScenario at = sc;
        at.alphaM = std::isfinite(alphaHat) ? alphaHat : 1.0;
        at.alphaM = std::min(at.alphaM, 1e300);
        row.regime = classify_regime(at, target);
        row.bornValid = std::isfinite(alphaHat) && born_validity(at, p.experiment).valid;
        row.alphaHat = row.bornValid ? alphaHat : nan;

        row.alphaHatGreenhouse = nan;
        if (options.greenhouse && !space) {
            const auto G = greenhouse_rate(sc, target, inner);
            const double a = coupling_from(threshold, p.etaDM * T, F.real() + G.real());
            DMScenario ag = sc;
            ag.alphaM = std::isfinite(a) ? a : 1.0;
            if (std::isfinite(a) && born_validity(ag, p.experiment).valid)
                row.alphaHatGreenhouse = a;
        }

        const double best = options.greenhouse && std::isfinite(row.alphaHatGreenhouse)
                                ? std::min(row.alphaHat, row.alphaHatGreenhouse)
                                : row.alphaHat;
        bool ok = row.bornValid;
        if (ok && !space && options.site.shielding == ShieldingMode::absorbing_earth
            && !options.greenhouse)
            ok = best < row.alphaIso;
        if (ok && !options.overlay.empty())
            ok = best < options.overlay.limit(row.m);
        row.detectable = ok;
        curve.rows[i] = std::move(row);
    });
    return curve;
}

std::vector<PhaseShiftRow> phase_shift_region(const RunPlan& plan, const DMScenario& base,
                                              const std::vector<double>& mGrid,
                                              const SensitivityOptions& options)
{
    if (mGrid.empty())
        throw ValidationError("m-grid", "must not be empty");
    if (options.mode != FluxMode::anisotropic)
        return {};
    const RunPlan p = effective_plan(plan);
    p.validate();
    const double T = p.experiment.exposure * units::hbar_eV_s;
    const double threshold = detection_threshold(p).threshold;
    std::vector<double> grid = mGrid;
    std::sort(grid.begin(), grid.end());
    std::vector<PhaseShiftRow> rows(grid.size());
    SensitivityOptions inner = options;
    inner.threads = 1;
    parallel_for(grid.size(), options.threads, [&](std::size_t i) {
        DMScenario sc = base;
        sc.m = grid[i];
        sc.alphaM = 1.0;
        const TargetModel target(p.experiment);
        const auto F = averaged_rate(sc, target, make_flux(sc, inner, p.experiment.space), inner);
        PhaseShiftRow r;
        r.m = grid[i];
        r.alphaHatDecoherence = coupling_from(threshold, p.etaDM * T, F.real());
        r.alphaHatPhase = coupling_from(threshold, p.etaDM * T, std::abs(F.imag()));
        // Treat |Im F| below the quadrature tolerance as zero.
        if (std::abs(F.imag()) <= options.relTol * std::abs(F))
            r.alphaHatPhase = inf;
        r.phaseFirst = r.alphaHatPhase < r.alphaHatDecoherence;
        rows[i] = r;
    });
    std::vector<PhaseShiftRow> region;
    for (const auto& r : rows)
        if (r.phaseFirst)
            region.push_back(r);
    return region;
}

} // namespace dmdecoh
