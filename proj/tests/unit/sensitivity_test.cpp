#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include <dmdecoh/errors.hpp>
#include <dmdecoh/sensitivity.hpp>
#include <dmdecoh/units.hpp>

using namespace dmdecoh;

TEST(Sensitivity, LogGrid)
{
    const auto g = log_grid(1e-2, 1e4, 61);
    ASSERT_EQ(g.size(), 61u);
    EXPECT_DOUBLE_EQ(g.front(), 1e-2);
    EXPECT_NEAR(g.back(), 1e4, 1e-8);
    EXPECT_NEAR(g[10], 1e-1, 1e-14);
    EXPECT_THROW(log_grid(1.0, 0.5, 3), ValidationError);
}

TEST(Sensitivity, OverlayInterpolatesPowerLaws)
{
    Overlay o{{1.0, 10.0, 100.0}, {1e-20, 1e-18, 1e-15}};
    EXPECT_NEAR(o.limit(std::sqrt(10.0)) / 1e-19, 1.0, 1e-12);
    EXPECT_NEAR(o.limit(100.0), 1e-15, 1e-27);
    EXPECT_TRUE(std::isinf(o.limit(0.5)));
    EXPECT_TRUE(std::isinf(o.limit(200.0)));
}

TEST(Sensitivity, SpacePlanUsesAbsoluteRate)
{
    const RunPlan p = effective_plan(RunPlan{find_experiment("MAQRO")});
    EXPECT_EQ(p.etaDM, 1.0);
    EXPECT_EQ(p.etaRes, 0.0);
    const RunPlan q = effective_plan(RunPlan{find_experiment("OTIMA")});
    EXPECT_EQ(q.etaDM, defaults::etaDM);
}

TEST(Sensitivity, CriticalCouplingIsLinearInverse)
{
    const auto sc = DMScenario::with_defaults(1e3, 10.0);
    RunPlan plan{find_experiment("MAQRO")};
    SensitivityOptions opt;
    opt.verifyLinearity = true;
    const auto c = critical_coupling(sc, plan, opt);
    EXPECT_GT(c.alphaHat, 0.0);
    EXPECT_NEAR(c.alphaHat * c.pilot, c.threshold, 1e-12 * c.threshold);
    EXPECT_LT(c.linearityError, 5e-3);

    const auto F = pilot_rate(sc, plan.experiment, opt);
    const double T = plan.experiment.exposure * units::hbar_eV_s;
    EXPECT_NEAR(c.pilot / (F.real() * T), 1.0, 1e-9);
}

TEST(Sensitivity, SweepRowsAgreeWithSinglePoints)
{
    const auto base = DMScenario::with_defaults(1e3, 1.0);
    RunPlan plan{find_experiment("MAQRO")};
    SensitivityOptions opt;
    opt.threads = 2;
    const std::vector<double> grid = {100.0, 1.0, 10.0};
    const auto curve = sweep_curve(plan, base, grid, opt);
    ASSERT_EQ(curve.rows.size(), 3u);
    EXPECT_EQ(curve.rows[0].m, 1.0);
    for (const auto& row : curve.rows) {
        auto sc = base;
        sc.m = row.m;
        const auto c = critical_coupling(sc, plan, opt);
        ASSERT_TRUE(row.bornValid);
        EXPECT_NEAR(row.alphaHat / c.alphaHat, 1.0, 1e-9) << row.m;
        EXPECT_GT(row.alphaIso, row.alphaScatt);
        EXPECT_TRUE(std::isnan(row.alphaHatGreenhouse));
    }
}

TEST(Sensitivity, PhaseRegionNeedsAnisotropy)
{
    const auto base = DMScenario::with_defaults(1e3, 1.0);
    RunPlan plan{find_experiment("MAQRO")};
    SensitivityOptions opt;
    opt.mode = FluxMode::isotropized;
    EXPECT_TRUE(phase_shift_region(plan, base, {1.0, 10.0}, opt).empty());
    EXPECT_THROW(phase_shift_region(plan, base, {}, {}), ValidationError);
}
