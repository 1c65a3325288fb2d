#include "dmdecoh/atmosphere.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "dmdecoh/decoherence.hpp"
#include "dmdecoh/errors.hpp"
#include "dmdecoh/parallel.hpp"
#include "dmdecoh/quadrature.hpp"
#include "dmdecoh/special.hpp"
#include "dmdecoh/units.hpp"

namespace dmdecoh {

namespace {

constexpr double pi = std::numbers::pi;

void require_momentum(double k)
{
    if (!(k > 0.0) || !std::isfinite(k))
        throw ValidationError("k", "must be > 0");
}

// Angular integrals use u = 1 - cos(theta) in [0, 2], where q^2 = 2 k^2 u and
// dsigma/du = 2 pi * 4 aM aDM M^2 / (a u + b)^2 with a = 2 k^2, b = m^2.
struct YukawaLaw
{
    double a;
    double b;
    double weight(double u) const
    {
        const double d = a * u + b;
        return 1.0 / (d * d);
    }
    std::vector<double> breaks() const
    {
        std::vector<double> pts{0.0};
        const double u0 = b / a;
        for (double f : {0.1, 1.0, 10.0, 100.0, 1e3, 1e4})
            if (f * u0 < 2.0)
                pts.push_back(f * u0);
        pts.push_back(2.0);
        return pts;
    }
};

double integrate_u(const YukawaLaw& law, auto&& g, double relTol = 1e-10)
{
    const auto pts = law.breaks();
    auto f = [&](double u) { return law.weight(u) * g(u); };
    return quad::integrate<double>(f, std::span<const double>(pts),
                                   {.rel_tol = relTol, .abs_tol = 0.0, .max_intervals = 2000})
        .value;
}

double coupling_factor(const DMScenario& sc)
{
    return 8.0 * pi * sc.alphaM * sc.alphaDM * sc.M * sc.M;
}

WalkTally absorbing_walk_chunked(int start, int length, std::int64_t walkers, std::uint64_t seed,
                                 int threads)
{
    constexpr std::int64_t chunk = 4096;
    const std::int64_t nChunks = (walkers + chunk - 1) / chunk;
    std::vector<std::int64_t> nearHits(static_cast<std::size_t>(nChunks), 0);
    parallel_for(static_cast<std::size_t>(nChunks), threads, [&](std::size_t c) {
        std::mt19937_64 rng(derive_seed(seed, c));
        const std::int64_t begin = static_cast<std::int64_t>(c) * chunk;
        const std::int64_t end = std::min(walkers, begin + chunk);
        std::int64_t hits = 0;
        for (std::int64_t i = begin; i < end; ++i) {
            int pos = start;
            while (pos > 0 && pos < length) {
                // 64 steps per draw.
                std::uint64_t bits = rng();
                for (int b = 0; b < 64 && pos > 0 && pos < length; ++b, bits >>= 1)
                    pos += (bits & 1U) ? 1 : -1;
            }
            if (pos == 0)
                ++hits;
        }
        nearHits[c] = hits;
    });
    WalkTally t;
    t.walkers = walkers;
    for (auto h : nearHits)
        t.absorbedNear += h;
    t.absorbedFar = walkers - t.absorbedNear;
    return t;
}

} // namespace

void AtmosphereModel::validate() const
{
    if (!(mAtm > 0.0))
        throw ValidationError("atmosphere.mAtm", "must be > 0");
    if (!(pAtm > 0.0))
        throw ValidationError("atmosphere.pAtm", "must be > 0");
    if (!(gE > 0.0))
        throw ValidationError("atmosphere.gE", "must be > 0");
    if (!(TAtm > 0.0))
        throw ValidationError("atmosphere.TAtm", "must be > 0");
    if (!(TCrust > 0.0))
        throw ValidationError("atmosphere.TCrust", "must be > 0");
}

SinSquaredTheta sigma_theta2(const DMScenario& scenario, double k)
{
    require_momentum(k);
    const YukawaLaw law{2.0 * k * k, scenario.m * scenario.m};
    // sin^2 theta = u (2 - u)
    const double norm = integrate_u(law, [](double) { return 1.0; });
    const double num = integrate_u(law, [](double u) { return u * (2.0 - u); });
    SinSquaredTheta out;
    out.quadrature = num / norm;

    const double beta = 2.0 * k / scenario.m;
    const double b2 = beta * beta;
    const double lg = std::log1p(b2);
    const double pre = 4.0 * (1.0 + b2) / (b2 * b2 * b2);
    out.printed = pre * ((2.0 + b2) * lg - b2);
    if (b2 < 1e-2) {
        // (2+x) ln(1+x) - 2x = x^3/6 - x^4/6 + 3 x^5/20 - ...
        out.closedForm = 4.0 * (1.0 + b2) * (1.0 / 6.0 - b2 / 6.0 + 3.0 * b2 * b2 / 20.0);
    } else {
        out.closedForm = pre * ((2.0 + b2) * lg - 2.0 * b2);
    }
    return out;
}

double molecular_cross_section(const DMScenario& scenario, double k, const Molecule& molecule)
{
    require_momentum(k);
    Experiment mol;
    mol.name = "molecule";
    mol.radius = molecule.radius * units::nm;
    mol.nucleons = molecule.nucleons;
    mol.massNumber = molecule.massNumber;
    const TargetModel target(mol);
    const YukawaLaw law{2.0 * k * k, scenario.m * scenario.m};
    const double I = integrate_u(
        law, [&](double u) { return structure_factor(k * std::sqrt(2.0 * u), target); }, 1e-8);
    return coupling_factor(scenario) * I;
}

ShieldingThresholds shielding_thresholds_at(const DMScenario& scenario, double k,
                                            const AtmosphereModel& atmosphere,
                                            const Molecule& molecule)
{
    scenario.validate();
    atmosphere.validate();
    const double sigma = molecular_cross_section(scenario, k, molecule);
    ShieldingThresholds t;
    if (sigma == 0.0) {
        t.zetaScatt = t.zetaIso = t.zetaTherm = std::numeric_limits<double>::infinity();
        return t;
    }
    const double sigma_m2 = sigma / (units::m * units::m);
    const double mAtm_kg = atmosphere.mAtm / units::GeV * units::GeV_kg;
    t.zetaScatt = mAtm_kg * atmosphere.gE / (sigma_m2 * atmosphere.pAtm);
    const double s2 = sigma_theta2(scenario, k).quadrature;
    const double nIso = pi * pi / s2;
    t.zetaIso = nIso * t.zetaScatt / std::sqrt(3.0);
    t.zetaTherm = std::sqrt(atmosphere.mAtm / scenario.M) * t.zetaIso;
    t.scattersOnce = t.zetaScatt <= 1.0;
    t.isotropizes = t.zetaIso <= 1.0;
    t.thermalizes = t.zetaTherm <= 1.0;
    return t;
}

ShieldingThresholds shielding_thresholds(const DMScenario& scenario,
                                         const AtmosphereModel& atmosphere,
                                         const Molecule& molecule)
{
    return shielding_thresholds_at(scenario, scenario.momentum(), atmosphere, molecule);
}

ThresholdCouplings threshold_couplings(const DMScenario& scenario,
                                       const AtmosphereModel& atmosphere,
                                       const Molecule& molecule)
{
    DMScenario unit = scenario;
    unit.alphaM = 1.0;
    const auto t = shielding_thresholds(unit, atmosphere, molecule);
    return {scenario.m, t.zetaScatt, t.zetaIso, t.zetaTherm};
}

std::vector<ThresholdCouplings> threshold_curves(const DMScenario& scenario,
                                                 const std::vector<double>& mGrid,
                                                 const AtmosphereModel& atmosphere, int threads)
{
    std::vector<ThresholdCouplings> rows(mGrid.size());
    parallel_for(mGrid.size(), threads, [&](std::size_t i) {
        DMScenario sc = scenario;
        sc.m = mGrid[i];
        rows[i] = threshold_couplings(sc, atmosphere);
    });
    return rows;
}

double ground_reach_probability(const ShieldingThresholds& thresholds)
{
    return std::min(1.0, thresholds.zetaIso);
}

double thermal_speed(double M, double T_kelvin)
{
    return std::sqrt(3.0 * T_kelvin * units::kelvin / M);
}

double greenhouse_enhancement(const DMScenario& scenario, const AtmosphereModel& atmosphere)
{
    scenario.validate();
    atmosphere.validate();
    if (scenario.M >= sinking_mass)
        return 0.0;
    DMScenario unit = scenario;
    unit.alphaM = 1.0;
    const double v300 = thermal_speed(scenario.M, atmosphere.TCrust);
    const auto hot = shielding_thresholds_at(unit, scenario.momentum(), atmosphere);
    const auto cold = shielding_thresholds_at(unit, scenario.M * v300, atmosphere);
    return hot.zetaIso / cold.zetaIso;
}

TransportCrossSection transport_cross_section(const DMScenario& scenario, double k)
{
    require_momentum(k);
    const double a = 2.0 * k * k;
    const double b = scenario.m * scenario.m;
    const double t = 2.0 * a / b;
    // Integral of u/(a u + b)^2 over [0, 2] = (ln(1+t) - t/(1+t)) / a^2.
    double bracket_over_a2;
    if (t < 1e-2) {
        bracket_over_a2 = 2.0 / (b * b) * (1.0 - 4.0 * t / 3.0 + 1.5 * t * t - 1.6 * t * t * t);
    } else {
        bracket_over_a2 = (std::log1p(t) - t / (1.0 + t)) / (a * a);
    }
    TransportCrossSection out;
    out.closedForm = coupling_factor(scenario) * bracket_over_a2;
    const YukawaLaw law{a, b};
    out.quadrature = coupling_factor(scenario) * integrate_u(law, [](double u) { return u; });
    return out;
}

WalkTally simulate_absorbing_walk(int n, int m, std::int64_t walkers, std::uint64_t seed,
                                  int threads)
{
    if (n < 1 || m < 1)
        throw ValidationError("walk", "both barrier distances must be >= 1");
    if (walkers < 1)
        throw ValidationError("walkers", "must be >= 1");
    return absorbing_walk_chunked(n, n + m, walkers, seed, threads);
}

double simulate_ground_reach(double zetaIso, std::int64_t walkers, std::uint64_t seed,
                             int threads)
{
    if (!(zetaIso > 0.0))
        throw ValidationError("zetaIso", "must be > 0");
    if (zetaIso >= 1.0)
        return 1.0;
    const int L = static_cast<int>(std::lround(1.0 / zetaIso));
    // Ground is site 0, the top barrier is site L; entry is one step below the top.
    const auto t = absorbing_walk_chunked(L - 1, L, walkers, seed, threads);
    return t.near_fraction();
}

std::vector<double> simulate_reflecting_occupancy(int L, std::int64_t walkers, std::uint64_t seed,
                                                  int threads)
{
    if (L < 1)
        throw ValidationError("L", "must be >= 1");
    constexpr std::int64_t chunk = 1024;
    const std::int64_t nChunks = (walkers + chunk - 1) / chunk;
    std::vector<std::vector<std::int64_t>> visits(static_cast<std::size_t>(nChunks));
    parallel_for(static_cast<std::size_t>(nChunks), threads, [&](std::size_t c) {
        std::mt19937_64 rng(derive_seed(seed, c));
        std::vector<std::int64_t> v(static_cast<std::size_t>(L) + 1, 0);
        const std::int64_t begin = static_cast<std::int64_t>(c) * chunk;
        const std::int64_t end = std::min(walkers, begin + chunk);
        // Site 0 is the absorbing top, site L the reflecting ground.
        for (std::int64_t i = begin; i < end; ++i) {
            int pos = 1;
            while (pos > 0) {
                ++v[pos];
                const bool up = rng() & 1U;
                if (up)
                    --pos;
                else if (pos < L)
                    ++pos;
            }
        }
        visits[c] = std::move(v);
    });
    std::vector<double> mean(static_cast<std::size_t>(L), 0.0);
    for (const auto& v : visits)
        for (int j = 1; j <= L; ++j)
            mean[j - 1] += static_cast<double>(v[j]);
    for (auto& x : mean)
        x /= static_cast<double>(walkers);
    return mean;
}

} // namespace dmdecoh
