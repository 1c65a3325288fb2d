#pragma once

#include <cstdint>
#include <vector>

#include "dmdecoh/types.hpp"

namespace dmdecoh {

struct AtmosphereModel
{
    double mAtm = 26e9;      //!< mean molecular mass [eV]
    double pAtm = 101325.0;  //!< surface pressure [Pa]
    double gE = 9.80665;     //!< [m/s^2]
    double TAtm = 270.0;     //!< [K]
    double TCrust = 300.0;   //!< [K]

    void validate() const;
};

/// Scatterer used for sigma_atm: a nitrogen molecule.
struct Molecule
{
    double nucleons = 28.0;
    double massNumber = 14.0;
    double radius = 0.2;     //!< [nm]
};

/// <sin^2 theta> under the single-nucleon Yukawa angular law.
struct SinSquaredTheta
{
    double quadrature = 0.0;  //!< authoritative
    double printed = 0.0;     //!< 4(1+b^2)/b^6 [(2+b^2) ln(1+b^2) - b^2], b = 2k/m
    double closedForm = 0.0;  //!< same with 2 b^2 subtracted; equals the quadrature
};

SinSquaredTheta sigma_theta2(const DMScenario& scenario, double k);

/// Total DM-molecule cross section at momentum k [1/eV^2], with coherent enhancement.
double molecular_cross_section(const DMScenario& scenario, double k, const Molecule& molecule = {});

struct ShieldingThresholds
{
    double zetaScatt = 0.0;
    double zetaIso = 0.0;
    double zetaTherm = 0.0;
    bool scattersOnce = false; //!< zetaScatt <= 1
    bool isotropizes = false;  //!< zetaIso <= 1
    bool thermalizes = false;  //!< zetaTherm <= 1
};

/// Depth fractions at k = M vBar.
ShieldingThresholds shielding_thresholds(const DMScenario& scenario,
                                         const AtmosphereModel& atmosphere = {},
                                         const Molecule& molecule = {});

/// Same, at an arbitrary incident momentum k [eV].
ShieldingThresholds shielding_thresholds_at(const DMScenario& scenario, double k,
                                            const AtmosphereModel& atmosphere = {},
                                            const Molecule& molecule = {});

/// Couplings alphaM at which each zeta equals 1; every zeta scales as 1/alphaM.
struct ThresholdCouplings
{
    double m = 0.0;
    double alphaScatt = 0.0;
    double alphaIso = 0.0;
    double alphaTherm = 0.0;
};

ThresholdCouplings threshold_couplings(const DMScenario& scenario,
                                       const AtmosphereModel& atmosphere = {},
                                       const Molecule& molecule = {});

std::vector<ThresholdCouplings> threshold_curves(const DMScenario& scenario,
                                                 const std::vector<double>& mGrid,
                                                 const AtmosphereModel& atmosphere = {},
                                                 int threads = 1);

/// min(1, zetaIso).
double ground_reach_probability(const ShieldingThresholds& thresholds);

/// Mass above which crust-thermalized DM sinks rather than returning [eV].
inline constexpr double sinking_mass = 37e6;

/// Ground-level number-flux multiplier of crust-thermalized DM: zetaIso(vBar) / zetaIso(v300).
double greenhouse_enhancement(const DMScenario& scenario, const AtmosphereModel& atmosphere = {});

/// RMS thermal speed sqrt(3 T / M) [c] at temperature T [K].
double thermal_speed(double M, double T_kelvin);

struct TransportCrossSection
{
    double closedForm = 0.0; //!< [1/eV^2]
    double quadrature = 0.0; //!< [1/eV^2]
};

/// Momentum-transfer cross section of a single nucleon, integral of (1 - cos theta) dsigma.
TransportCrossSection transport_cross_section(const DMScenario& scenario, double k);

// Lattice random walks in fractional depth, symmetric unit steps.

struct WalkTally
{
    std::int64_t walkers = 0;
    std::int64_t absorbedNear = 0; //!< at the barrier n steps from the start
    std::int64_t absorbedFar = 0;

    double near_fraction() const { return double(absorbedNear) / double(walkers); }
    double far_fraction() const { return double(absorbedFar) / double(walkers); }
};

/// Walkers start n steps from one absorbing barrier and m from the other.
WalkTally simulate_absorbing_walk(int n, int m, std::int64_t walkers, std::uint64_t seed,
                                  int threads = 1);

/// Walkers enter one step below the top of an atmosphere of round(1/zetaIso) steps;
/// returns the fraction that reaches the ground before escaping.
double simulate_ground_reach(double zetaIso, std::int64_t walkers, std::uint64_t seed,
                             int threads = 1);

/// Mean visits per walker to each depth site 1..L, with the top absorbing and the ground
/// reflecting (a walker at the ground stays with probability 1/2).
std::vector<double> simulate_reflecting_occupancy(int L, std::int64_t walkers, std::uint64_t seed,
                                                  int threads = 1);

} // namespace dmdecoh
