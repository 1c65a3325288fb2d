#pragma once

#include <string>
#include <vector>

#include "dmdecoh/types.hpp"

namespace dmdecoh {

/// |T2/T1| of the Born series for a coherent Yukawa target.
struct BornValidity
{
    double ratio = 0.0;
    std::string regime; //!< k<<m, q<<m<<k, m<<q<<k, k<<1/R<<m, k,m>>1/R, mixed
    bool valid = true;  //!< ratio < 1
};

/// Ratio at momentum k and transfer q [eV]; "<<" means a factor of at least 10.
BornValidity born_validity(const DMScenario& scenario, const Experiment& experiment, double k,
                           double q);

/// Ratio at k = M vBar and the dominant transfer 1/q = max(1/m, R, 1/(M vBar)).
BornValidity born_validity(const DMScenario& scenario, const Experiment& experiment);

/// Spherical square hump (V0 > 0) or well (V0 < 0) of radius R, natural units.
struct SquareWell
{
    double V0 = 0.0;
    double R = 1.0;

    /// kappa^2 = k^2 - 2 M V0; negative inside a hump below the barrier.
    double kappa_squared(double k, double M) const { return k * k - 2.0 * M * V0; }
};

/// Phase shifts delta_l for l = 0..lmax from the spherical-Bessel matching condition.
std::vector<double> square_well_phase_shifts(const SquareWell& well, double k, double M, int lmax);

/// Partial-wave cut-off max(10, 2 ceil(kR) + 10).
int square_well_lmax(const SquareWell& well, double k);

/// (4 pi / k^2) sum (2l+1) sin^2 delta_l.
double square_well_exact_sigma(const SquareWell& well, double k, double M);

/// First Born approximation, closed form.
double square_well_born_sigma(const SquareWell& well, double k, double M);

/// Low-energy limit 4 pi R^2 (1 - tanh(g)/g)^2 with g = R sqrt(2 M V0); tan for wells.
double square_well_s_wave_sigma(const SquareWell& well, double M);

} // namespace dmdecoh
