#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include <dmdecoh/quadrature.hpp>

using namespace dmdecoh;

TEST(Quadrature, SingleKronrodPanelIsExactForPolynomials)
{
    // G7K15 integrates degree 22 exactly.
    auto r = quad::gk15<double>([](double x) { return std::pow(x, 20); }, 0.0, 1.0);
    EXPECT_NEAR(r.value, 1.0 / 21.0, 1e-15);
}

TEST(Quadrature, AdaptiveHandlesEndpointSingularity)
{
    auto r = quad::integrate<double>([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                     {.rel_tol = 1e-10, .abs_tol = 0.0, .max_intervals = 500});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(Quadrature, ComplexOscillatoryIntegrand)
{
    // integral_0^10 e^{i 7 x} dx = (e^{70 i} - 1) / (7 i)
    using C = std::complex<double>;
    const C I(0.0, 1.0);
    auto r = quad::integrate<C>([&](double x) { return std::exp(I * 7.0 * x); }, 0.0, 10.0,
                                {.rel_tol = 1e-12, .abs_tol = 0.0, .max_intervals = 500});
    const C exact = (std::exp(I * 70.0) - 1.0) / (7.0 * I);
    EXPECT_LT(std::abs(r.value - exact), 1e-11);
}

TEST(Quadrature, BreakpointsAreSortedAndClipped)
{
    auto pts = quad::breakpoints(0.0, 2.0, {1.5, -1.0, 0.5, 1.5, NAN, 3.0});
    ASSERT_EQ(pts.size(), 4u);
    EXPECT_EQ(pts[0], 0.0);
    EXPECT_EQ(pts[1], 0.5);
    EXPECT_EQ(pts[2], 1.5);
    EXPECT_EQ(pts[3], 2.0);
}

TEST(Quadrature, BudgetExhaustionIsReported)
{
    auto r = quad::integrate<double>([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0,
                                     {.rel_tol = 1e-14, .abs_tol = 0.0, .max_intervals = 8});
    EXPECT_FALSE(r.converged);
}

TEST(Quadrature, GaussLegendreRule)
{
    const auto& rule = quad::gauss_legendre(10);
    double wsum = 0.0;
    for (double w : rule.w)
        wsum += w;
    EXPECT_NEAR(wsum, 2.0, 1e-14);
    const double v = quad::fixed_gl<double>([](double x) { return std::exp(x); }, 0.0, 1.0, rule);
    EXPECT_NEAR(v, std::exp(1.0) - 1.0, 1e-14);
}
