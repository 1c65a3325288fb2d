#include "dmdecoh/born.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dmdecoh/errors.hpp"
#include "dmdecoh/special.hpp"

namespace dmdecoh {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kMuchLess = 10.0;

bool much_less(double a, double b) { return kMuchLess * a <= b; }

} // namespace

BornValidity born_validity(const DMScenario& scenario, const Experiment& experiment, double k,
                           double q)
{
    scenario.validate();
    experiment.validate();
    if (!(k > 0.0) || !(q > 0.0))
        throw ValidationError("born.k", "k and q must be > 0");
    const double pref = experiment.nucleons * std::sqrt(scenario.alphaDM * scenario.alphaM)
                        / scenario.vBar;
    const double m = scenario.m;
    const double invR = 1.0 / experiment.radius;

    BornValidity out;
    if (pref == 0.0) {
        out.regime = "free";
        return out;
    }

    // Candidate formulas, each tagged with whether its ordering holds strictly.
    struct Candidate
    {
        const char* name;
        double value;
        bool strict;
    };
    std::vector<Candidate> cands;
    if (m < invR) {
        const bool small = much_less(m, invR);
        cands.push_back({"k<<m", k / m, small && much_less(k, m)});
        cands.push_back({"q<<m<<k", 0.5, small && much_less(q, m) && much_less(m, k)});
        if (q > m)
            cands.push_back({"m<<q<<k", 2.0 * std::log(q / m),
                             small && much_less(m, q) && much_less(q, k)});
    } else {
        const bool large = much_less(invR, m);
        cands.push_back({"k<<1/R<<m", 12.0 * k / (5.0 * m * m * experiment.radius),
                         large && much_less(k, invR)});
        const double g = 3.0 / (2.0 * m * experiment.radius);
        cands.push_back({"k,m>>1/R", g * g, large && much_less(invR, k)});
    }
    const auto strict = std::find_if(cands.begin(), cands.end(),
                                     [](const Candidate& c) { return c.strict; });
    if (strict != cands.end()) {
        out.regime = strict->name;
        out.ratio = pref * strict->value;
    } else {
        out.regime = "mixed";
        double best = 0.0;
        for (const auto& c : cands)
            best = std::max(best, c.value);
        out.ratio = pref * best;
    }
    out.valid = out.ratio < 1.0;
    return out;
}

BornValidity born_validity(const DMScenario& scenario, const Experiment& experiment)
{
    const double k = scenario.momentum();
    const double inv_q = std::max({1.0 / scenario.m, experiment.radius, 1.0 / k});
    return born_validity(scenario, experiment, k, 1.0 / inv_q);
}

int square_well_lmax(const SquareWell& well, double k)
{
    return std::max(10, 2 * static_cast<int>(std::ceil(k * well.R)) + 10);
}

std::vector<double> square_well_phase_shifts(const SquareWell& well, double k, double M, int lmax)
{
    if (!(k > 0.0))
        throw ValidationError("well.k", "must be > 0");
    if (!(well.R > 0.0))
        throw ValidationError("well.R", "must be > 0");
    std::vector<double> jk, yk, inner;
    const double x = k * well.R;
    special::sph_bessel_j(lmax + 1, x, jk);
    special::sph_bessel_y(lmax + 1, x, yk);
    const double kap2 = well.kappa_squared(k, M);
    const double kap = std::sqrt(std::abs(kap2));
    const double xi = kap * well.R;
    const bool evanescent = kap2 < 0.0;
    if (evanescent)
        special::sph_bessel_i_scaled(lmax + 1, xi, inner);
    else
        special::sph_bessel_j(lmax + 1, xi, inner);

    std::vector<double> delta(lmax + 1, 0.0);
    for (int l = 0; l <= lmax; ++l) {
        // Interior value u and radial derivative du (common scale factors cancel).
        double u;
        double du;
        if (xi == 0.0) {
            // Interior solution r^l: log-derivative l/R.
            u = 1.0;
            du = l / well.R;
        } else if (evanescent) {
            u = inner[l];
            du = kap * (inner[l + 1] + (l / xi) * inner[l]);
        } else {
            u = inner[l];
            du = kap * (-inner[l + 1] + (l / xi) * inner[l]);
        }
        const double djk = k * (-jk[l + 1] + (l / x) * jk[l]);
        const double dyk = k * ((l / x) * yk[l] - yk[l + 1]);
        const double num = djk * u - jk[l] * du;
        const double den = dyk * u - yk[l] * du;
        if (!std::isfinite(num) || !std::isfinite(den) || (num == 0.0 && den == 0.0)) {
            delta[l] = 0.0;
            continue;
        }
        delta[l] = std::atan2(num, den);
        // Fold into (-pi/2, pi/2]; sin^2 is unchanged.
        if (delta[l] > 0.5 * pi)
            delta[l] -= pi;
        else if (delta[l] <= -0.5 * pi)
            delta[l] += pi;
    }
    return delta;
}

double square_well_exact_sigma(const SquareWell& well, double k, double M)
{
    const int lmax = square_well_lmax(well, k);
    const auto delta = square_well_phase_shifts(well, k, M, lmax);
    double sum = 0.0;
    for (int l = 0; l <= lmax; ++l) {
        const double s = std::sin(delta[l]);
        sum += (2.0 * l + 1.0) * s * s;
    }
    return 4.0 * pi / (k * k) * sum;
}

double square_well_born_sigma(const SquareWell& well, double k, double M)
{
    if (!(k > 0.0))
        throw ValidationError("well.k", "must be > 0");
    const double x = 2.0 * k * well.R;
    double P;
    if (x < 0.2) {
        const double x2 = x * x;
        P = x2 * (2.0 / 9.0 - x2 / 45.0 + 2.0 * x2 * x2 / 1575.0);
    } else {
        const double s = std::sin(x);
        P = 1.0 - 1.0 / (x * x) + std::sin(2.0 * x) / (x * x * x) - s * s / (x * x * x * x);
    }
    const double R2 = well.R * well.R;
    return 2.0 * pi * M * M * well.V0 * well.V0 * R2 * R2 / (k * k) * P;
}

double square_well_s_wave_sigma(const SquareWell& well, double M)
{
    const double g = well.R * std::sqrt(2.0 * M * std::abs(well.V0));
    if (g == 0.0)
        return 0.0;
    const double ratio = well.V0 >= 0.0 ? std::tanh(g) / g : std::tan(g) / g;
    // Scattering length a = R (1 - ratio); sigma = 4 pi a^2.
    return 4.0 * pi * well.R * well.R * (1.0 - ratio) * (1.0 - ratio);
}

} // namespace dmdecoh
