#include "dmdecoh/statistics.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "dmdecoh/errors.hpp"
#include "dmdecoh/parallel.hpp"

namespace dmdecoh {

namespace {

void require_visibility(double g)
{
    if (!(g >= 0.0 && g <= 1.0))
        throw ValidationError("gammaVis", "must lie in [0, 1]");
}

template <class T>
double estimator(T a, T b, T c, T d)
{
    const double A = static_cast<double>(a), B = static_cast<double>(b);
    const double C = static_cast<double>(c), D = static_cast<double>(d);
    const double den = A * C - B * D;
    if (den == 0.0)
        throw DegenerateDataError("sidereal estimator: zero denominator");
    return 2.0 * (A * D - B * C) / den;
}

} // namespace

void RunPlan::validate() const
{
    experiment.validate();
    if (!(runLength > 0.0))
        throw ValidationError("plan.runLength", "must be > 0");
    if (!(etaDM >= 0.0 && etaDM <= 1.0))
        throw ValidationError("plan.etaDM", "must lie in [0, 1]");
    if (!(etaRes >= 0.0))
        throw ValidationError("plan.etaRes", "must be >= 0");
}

BinMeans expected_bins(double sTilde, double gammaVis, double B0, double deltaB)
{
    require_visibility(gammaVis);
    if (!(B0 > 0.0))
        throw ValidationError("B0", "must be > 0");
    if (!(std::abs(deltaB) < B0))
        throw ValidationError("deltaB", "must satisfy |deltaB| < B0");
    const double mrn = (B0 + 0.5 * deltaB) / 4.0;
    const double eve = (B0 - 0.5 * deltaB) / 4.0;
    const double cm = gammaVis * (1.0 + 0.5 * sTilde);
    const double ce = gammaVis * (1.0 - 0.5 * sTilde);
    BinMeans b;
    b.mrnPlus = mrn * (1.0 + cm);
    b.mrnMinus = mrn * (1.0 - cm);
    b.evePlus = eve * (1.0 + ce);
    b.eveMinus = eve * (1.0 - ce);
    if (b.mrnMinus < 0.0 || b.eveMinus < 0.0)
        throw ValidationError("sTilde", "bin means must be non-negative");
    return b;
}

double estimate_sidereal(const BinMeans& b)
{
    return estimator(b.mrnPlus, b.mrnMinus, b.evePlus, b.eveMinus);
}

double estimate_sidereal(const BinCounts& c)
{
    if (c.total() <= 0)
        throw DegenerateDataError("sidereal estimator: no events");
    return estimator(c.mrnPlus, c.mrnMinus, c.evePlus, c.eveMinus);
}

EstimatorSpread estimator_stddev(double B0, double gammaVis, double sTilde, double deltaB)
{
    if (!(B0 > 0.0))
        throw ValidationError("B0", "must be > 0");
    if (!(gammaVis > 0.0 && gammaVis <= 1.0))
        throw ValidationError("gammaVis", "must lie in (0, 1]");
    const double g2 = gammaVis * gammaVis;
    const double s2 = sTilde * sTilde;
    const double num = B0 * (4.0 * (4.0 + s2) - g2 * (4.0 - s2) * (4.0 - s2)) + 8.0 * deltaB * sTilde;
    const double den = g2 * (4.0 * B0 * B0 - deltaB * deltaB);
    EstimatorSpread out;
    out.full = std::sqrt(std::max(0.0, num / den));
    out.asymptotic = 2.0 * std::sqrt((1.0 / g2 - 1.0) / B0);
    out.asymptoticValid = std::abs(sTilde) < 0.1 * (1.0 - gammaVis)
                          && std::abs(deltaB) < 0.1 * B0;
    return out;
}

Threshold detection_threshold(const RunPlan& plan)
{
    plan.validate();
    const double g = plan.experiment.visibility;
    Threshold t;
    t.sigma = estimator_stddev(plan.expected_events(), g).full;
    t.background = plan.etaRes * std::log(1.0 / g);
    t.threshold = t.sigma + t.background;
    t.chi = 1.0 / t.threshold;
    return t;
}

BinCounts simulate_run(double sTilde, double gammaVis, double B0, double deltaB,
                       std::uint64_t seed)
{
    const BinMeans mu = expected_bins(sTilde, gammaVis, B0, deltaB);
    std::mt19937_64 rng(seed);
    auto draw = [&rng](double mean) -> std::int64_t {
        if (mean <= 0.0)
            return 0;
        std::poisson_distribution<std::int64_t> pd(mean);
        return pd(rng);
    };
    BinCounts c;
    c.mrnPlus = draw(mu.mrnPlus);
    c.mrnMinus = draw(mu.mrnMinus);
    c.evePlus = draw(mu.evePlus);
    c.eveMinus = draw(mu.eveMinus);
    return c;
}

ReplicaSummary simulate_replicas(double sTilde, double gammaVis, double B0, double deltaB,
                                 std::int64_t replicas, std::uint64_t seed, int threads,
                                 std::vector<BinCounts>* counts)
{
    if (replicas < 2)
        throw ValidationError("replicas", "must be >= 2");
    const double sigma = estimator_stddev(B0, gammaVis, sTilde, deltaB).full;
    const auto n = static_cast<std::size_t>(replicas);
    std::vector<BinCounts> all(n);
    std::vector<double> est(n, std::numeric_limits<double>::quiet_NaN());
    parallel_for(n, threads, [&](std::size_t i) {
        all[i] = simulate_run(sTilde, gammaVis, B0, deltaB, derive_seed(seed, i));
        try {
            est[i] = estimate_sidereal(all[i]);
        } catch (const DegenerateDataError&) {
        }
    });
    ReplicaSummary r;
    r.replicas = replicas;
    double sum = 0.0, sum2 = 0.0;
    std::int64_t used = 0, covered = 0;
    for (double e : est) {
        if (std::isnan(e)) {
            ++r.degenerate;
            continue;
        }
        ++used;
        sum += e;
        sum2 += e * e;
        if (std::abs(e - sTilde) < 1.96 * sigma)
            ++covered;
    }
    if (used < 2)
        throw DegenerateDataError("replica ensemble: fewer than two usable replicas");
    r.mean = sum / used;
    r.stddev = std::sqrt(std::max(0.0, (sum2 - used * r.mean * r.mean) / (used - 1)));
    r.coverage = static_cast<double>(covered) / used;
    if (counts)
        *counts = std::move(all);
    return r;
}

namespace {

std::complex<double> fundamental(const std::vector<double>& v)
{
    if (v.size() < 3)
        throw ValidationError("series", "needs at least three samples");
    const double n = static_cast<double>(v.size());
    std::complex<double> c = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double ph = 2.0 * std::numbers::pi * static_cast<double>(i) / n;
        c += v[i] * std::complex<double>(std::cos(ph), -std::sin(ph));
    }
    return c * (2.0 / n);
}

} // namespace

double fundamental_amplitude(const std::vector<double>& values)
{
    return std::abs(fundamental(values));
}

double fundamental_phase(const std::vector<double>& values)
{
    // The series peaks where A cos(2 pi (t - t0)) does; the DFT coefficient is A e^{-2 pi i t0}.
    const double ph = -std::arg(fundamental(values)) / (2.0 * std::numbers::pi);
    return ph < 0.0 ? ph + 1.0 : ph;
}

} // namespace dmdecoh
