#pragma once

#include <complex>
#include <string>
#include <vector>

#include "dmdecoh/atmosphere.hpp"
#include "dmdecoh/decoherence.hpp"
#include "dmdecoh/flux.hpp"
#include "dmdecoh/statistics.hpp"

namespace dmdecoh {

/// Existing-limit curve alphaM(m), interpolated in log-log; outside its range nothing is excluded.
struct Overlay
{
    std::vector<double> m;
    std::vector<double> alpha;

    bool empty() const { return m.empty(); }
    /// Limit at mediator mass m, or +inf outside the tabulated range.
    double limit(double mediator) const;
};

struct SensitivityOptions
{
    Site site;
    FluxMode mode = FluxMode::anisotropic;
    bool greenhouse = false;
    int phases = 4;          //!< sidereal phases averaged for Earth-bound rates
    double windAngle = 0.0;  //!< space mode: angle between wind and separation [rad]
    double relTol = 1e-2;
    bool verifyLinearity = false;
    int threads = 1;
    AtmosphereModel atmosphere;
    Overlay overlay;
};

struct CriticalCoupling
{
    double alphaHat = 0.0;
    double pilot = 0.0;            //!< s~_DM at alphaM = 1
    double threshold = 0.0;
    double linearityError = 0.0;   //!< |s~(alphaHat)/threshold - 1| when verified
};

/// Complex decoherence rate at alphaM = 1 [1/s], sidereal-averaged for Earth-bound sites.
std::complex<double> pilot_rate(const DMScenario& scenario, const Experiment& experiment,
                                const SensitivityOptions& options);

/// Effective (eta, etaRes) of a plan; a space experiment uses the absolute rate and no background.
RunPlan effective_plan(const RunPlan& plan);

/// alphaHat = threshold / s~_DM(alphaM = 1); s~ is linear in alphaM in the Born regime.
CriticalCoupling critical_coupling(const DMScenario& scenario, const RunPlan& plan,
                                   const SensitivityOptions& options = {});

struct SensitivityRow
{
    double m = 0.0;
    double alphaHat = 0.0; //!< NaN past the Born cutoff
    std::string regime;
    bool bornValid = true;
    double alphaScatt = 0.0;
    double alphaIso = 0.0;
    double alphaTherm = 0.0;
    double alphaHatGreenhouse = 0.0; //!< NaN unless requested and applicable
    bool detectable = false;
};

struct SensitivityCurve
{
    std::string experimentName;
    double M = 0.0;
    std::vector<SensitivityRow> rows;
};

/// Log-spaced grid of `points` values from lo to hi.
std::vector<double> log_grid(double lo, double hi, int points);

SensitivityCurve sweep_curve(const RunPlan& plan, const DMScenario& base,
                             const std::vector<double>& mGrid,
                             const SensitivityOptions& options = {});

struct PhaseShiftRow
{
    double m = 0.0;
    double alphaHatDecoherence = 0.0;
    double alphaHatPhase = 0.0; //!< +inf when Im F vanishes
    bool phaseFirst = false;    //!< the phase channel crosses threshold first
};

/// Rows where the phase channel reaches threshold at a smaller coupling than decoherence.
std::vector<PhaseShiftRow> phase_shift_region(const RunPlan& plan, const DMScenario& base,
                                              const std::vector<double>& mGrid,
                                              const SensitivityOptions& options = {});

} // namespace dmdecoh
