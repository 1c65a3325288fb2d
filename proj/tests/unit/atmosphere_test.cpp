#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <dmdecoh/atmosphere.hpp>
#include <dmdecoh/errors.hpp>
#include <dmdecoh/units.hpp>

using namespace dmdecoh;

namespace {

template <class F>
double simpson(F f, double a, double b, int n)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Integrate in u = 1 - cos(theta) on a log grid so forward peaks are resolved.
template <class F>
double angular_integral(F f, double scale)
{
    double total = simpson(f, 0.0, std::min(2.0, scale), 2000);
    for (double lo = scale; lo < 2.0; lo *= 4.0)
        total += simpson(f, lo, std::min(2.0, 4.0 * lo), 2000);
    return total;
}

} // namespace

TEST(Atmosphere, SinSquaredMatchesDirectAverage)
{
    for (double m : {1e-2, 1.0, 100.0, 1e4}) {
        const auto sc = DMScenario::with_defaults(1e6, m);
        const double k = sc.momentum();
        const double a = 2.0 * k * k, b = m * m;
        auto w = [&](double u) { return 1.0 / ((a * u + b) * (a * u + b)); };
        auto s2 = [&](double u) { return u * (2.0 - u) * w(u); };
        const double ref = angular_integral(s2, b / a) / angular_integral(w, b / a);
        const auto r = sigma_theta2(sc, k);
        EXPECT_NEAR(r.quadrature / ref, 1.0, 1e-5) << m;
        EXPECT_NEAR(r.closedForm / ref, 1.0, 1e-5) << m;
    }
}

TEST(Atmosphere, IsotropicLimitOfSinSquared)
{
    // Heavy mediator: isotropic scattering, <sin^2> = 2/3.
    const auto sc = DMScenario::with_defaults(1e3, 1e6);
    EXPECT_NEAR(sigma_theta2(sc, sc.momentum()).quadrature, 2.0 / 3.0, 1e-6);
}

TEST(Atmosphere, TransportCrossSectionMatchesDirectIntegral)
{
    for (double m : {1e-3, 1.0, 1e3}) {
        const auto sc = DMScenario::with_defaults(1e6, m);
        const double k = sc.momentum();
        const double a = 2.0 * k * k, b = m * m;
        // dsigma/dOmega = 4 M^2 / (q^2 + m^2)^2; dOmega = 2 pi du.
        auto f = [&](double u) { return 2.0 * std::numbers::pi * 4.0 * sc.M * sc.M * u / ((a * u + b) * (a * u + b)); };
        const double ref = angular_integral(f, b / a);
        const auto t = transport_cross_section(sc, k);
        EXPECT_NEAR(t.closedForm / ref, 1.0, 1e-5) << m;
        EXPECT_NEAR(t.quadrature / ref, 1.0, 1e-5) << m;
    }
}

TEST(Atmosphere, TransportScalesAsInverseFourthPowerOfSpeed)
{
    const auto sc = DMScenario::with_defaults(1e6, 1e-3);
    const double k = sc.momentum();
    const double a = transport_cross_section(sc, k).closedForm;
    const double b = transport_cross_section(sc, 2.0 * k).closedForm;
    EXPECT_NEAR(std::log(b / a) / std::log(2.0), -4.0, 0.1);
}

TEST(Atmosphere, ThresholdsScaleInverselyWithCoupling)
{
    auto sc = DMScenario::with_defaults(1e5, 10.0);
    const auto one = shielding_thresholds(sc);
    sc.alphaM = 4.0;
    const auto four = shielding_thresholds(sc);
    EXPECT_NEAR(four.zetaScatt / one.zetaScatt, 0.25, 1e-12);
    EXPECT_NEAR(four.zetaIso / one.zetaIso, 0.25, 1e-12);
    EXPECT_LE(one.zetaScatt, one.zetaIso);
    EXPECT_NEAR(one.zetaTherm / one.zetaIso, std::sqrt(26e9 / 1e5), 1e-9);

    sc.alphaM = 1.0;
    const auto c = threshold_couplings(sc);
    EXPECT_NEAR(c.alphaIso, one.zetaIso, 1e-12 * one.zetaIso);
    EXPECT_NEAR(ground_reach_probability(one), std::min(1.0, one.zetaIso), 0.0);
}

TEST(Atmosphere, ScatteringDepthFromColumnMass)
{
    const auto sc = DMScenario::with_defaults(1e6, 1.0);
    const AtmosphereModel atm;
    const double sigma = molecular_cross_section(sc, sc.momentum());
    const double sigma_m2 = units::area_cm2(sigma) * 1e-4;
    const double column = atm.pAtm / atm.gE;               // kg / m^2
    const double molecule = atm.mAtm * units::GeV_kg / 1e9; // kg
    EXPECT_NEAR(shielding_thresholds(sc, atm).zetaScatt, molecule / (column * sigma_m2), 1e-9 * molecule / (column * sigma_m2));
}

TEST(Atmosphere, GreenhouseForwardRegime)
{
    const auto sc = DMScenario::with_defaults(1e6, 1e-3);
    const double ratio = sc.M * sc.vBar * sc.vBar / 3.0 / (300.0 * units::kelvin);
    EXPECT_NEAR(greenhouse_enhancement(sc) / (ratio * ratio), 1.0, 0.25);
    EXPECT_EQ(greenhouse_enhancement(DMScenario::with_defaults(40e6, 1e-3)), 0.0);
}

TEST(Atmosphere, ThermalSpeed)
{
    EXPECT_NEAR(thermal_speed(1e6, 300.0), std::sqrt(3.0 * 300.0 * units::kelvin / 1e6), 1e-18);
}

TEST(Atmosphere, AbsorbingWalkSplitsByDistance)
{
    for (auto [n, m] : {std::pair{1, 3}, std::pair{2, 5}, std::pair{4, 4}}) {
        const std::int64_t W = 100000;
        const auto t = simulate_absorbing_walk(n, m, W, 3, 2);
        EXPECT_EQ(t.absorbedNear + t.absorbedFar, W);
        const double p = double(m) / (n + m);
        EXPECT_NEAR(t.near_fraction(), p, 3.0 * std::sqrt(p * (1 - p) / W)) << n << "," << m;
    }
}

TEST(Atmosphere, WalkIsDeterministicAcrossThreads)
{
    const auto a = simulate_absorbing_walk(3, 7, 20000, 17, 1);
    const auto b = simulate_absorbing_walk(3, 7, 20000, 17, 4);
    EXPECT_EQ(a.absorbedNear, b.absorbedNear);
}

TEST(Atmosphere, GroundReachEqualsIsotropizationDepth)
{
    const std::int64_t W = 100000;
    for (double zeta : {0.5, 0.1, 0.04}) {
        const double p = simulate_ground_reach(zeta, W, 5, 2);
        EXPECT_NEAR(p, zeta, 3.0 * std::sqrt(zeta * (1 - zeta) / W)) << zeta;
    }
}

TEST(Atmosphere, ReflectingGroundGivesUniformOccupancy)
{
    const auto v = simulate_reflecting_occupancy(6, 40000, 9, 2);
    ASSERT_EQ(v.size(), 6u);
    for (double x : v)
        EXPECT_NEAR(x, 2.0, 0.15);
}

TEST(Atmosphere, RejectsBadModel)
{
    AtmosphereModel atm;
    atm.pAtm = -1.0;
    EXPECT_THROW(atm.validate(), ValidationError);
}
