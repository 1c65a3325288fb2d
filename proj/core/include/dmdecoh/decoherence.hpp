#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "dmdecoh/flux.hpp"
#include "dmdecoh/types.hpp"

namespace dmdecoh {

/// Superposed target: a uniform sphere with optional Debye-Waller suppression.
struct TargetModel
{
    Experiment experiment;
    bool debyeWaller = false;
    double temperature = 300.0 * 8.617333262e-5; //!< [eV]
    double zeroPointFloor = 0.0;                   //!< rms displacement floor [1/eV]

    explicit TargetModel(Experiment e) : experiment(std::move(e)) {}
    /// <y^2> = max(d300K^2 T / 300 K, floor^2).
    double mean_square_displacement() const;
    /// exp(-q^2 <y^2> / 3), or 1 when disabled.
    double debye_waller_factor(double q) const;
};

/// 3(sin x - x cos x)/x^3.
double sphere_form_factor(double x);

/// I(q) = N + A^2 N_a (N_a - 1) f(qR)^2 exp(-2W).
double structure_factor(double q, const TargetModel& target);

struct DecoherenceResult
{
    std::complex<double> rate; //!< [1/s]; real: decoherence, imaginary: phase shift
    double absErr = 0.0;       //!< [1/s]
    double errRe = 0.0;
    double errIm = 0.0;
    double totalRate = 0.0;    //!< flux-weighted total scattering rate [1/s]
    std::string regime;        //!< coherent-large-sep, coherent-small-sep, incoherent-floor, mixed
    bool bornValid = true;
};

enum class RateRoute
{
    automatic, //!< Legendre reduction when the density is unmasked or isotropic
    triple,    //!< direct triple integral, valid for every flux model
    legendre
};

struct RateOptions
{
    double relTol = 1e-3;
    RateRoute route = RateRoute::automatic;
    int maxPanels = 20000;
    int maxIntervals = 600;
};

/// Quadrature evaluation of the complex decoherence rate F(dx).
DecoherenceResult decoherence_rate(const DMScenario& scenario, const TargetModel& target,
                                   const FluxModel& flux, double windAngle,
                                   const RateOptions& options = {});

/// Flux-weighted total scattering rate [1/s], the large-separation limit of Re F.
double total_scattering_rate(const DMScenario& scenario, const TargetModel& target,
                             const FluxModel& flux, double windAngle,
                             const RateOptions& options = {});

/// Monte Carlo estimate built directly on the scattering angle; independent of worker count.
DecoherenceResult decoherence_rate_mc(const DMScenario& scenario, const TargetModel& target,
                                      const FluxModel& flux, double windAngle,
                                      std::int64_t nSamples, std::uint64_t seed, int threads = 1);

/// Single-nucleon Yukawa cross section 16 pi aM aDM M^2 / (m^2 (m^2 + 4 k^2)) [1/eV^2].
double yukawa_total_cross_section(const DMScenario& scenario, double k);

/// u = 1 - cos(theta) at cumulative probability P of the single-nucleon angular law.
double yukawa_inverse_cdf(double k, double m, double P);

enum class ScaleKind
{
    xiMed,
    xiRad,
    unity,
    xiSep
};

std::string_view to_string(ScaleKind kind);

struct LimitingRate
{
    double rate = 0.0; //!< [1/s]
    ScaleKind omega = ScaleKind::unity;
    ScaleKind phi = ScaleKind::unity;
    double Y = 0.0;
    std::string regime;
};

/// Tabulated coefficient Y for (Omega, Phi); phi is either omega itself or xiSep.
double limiting_coefficient(ScaleKind omega, ScaleKind phi);

/// Closed-form rate in the six limiting regimes; throws MixedRegimeError when no scale dominates.
LimitingRate limiting_rate(const DMScenario& scenario, const Experiment& experiment,
                           double dominance = 10.0);

struct DecoherenceFactor
{
    std::complex<double> gamma;
    double s = 0.0;   //!< decoherence, Re of the integrated rate
    double phi = 0.0; //!< phase, Im of the integrated rate
};

/// gamma = exp(-F T) for a constant rate [1/s] over T [s].
DecoherenceFactor decoherence_factor(std::complex<double> rate, double T);

/// gamma = exp(-integral F dt) by the trapezoid rule over a sampled series.
DecoherenceFactor decoherence_factor(const std::vector<double>& times,
                                     const std::vector<std::complex<double>>& rates);

/// Regime label from the dimensionless groups and the coherent enhancement.
std::string classify_regime(const DMScenario& scenario, const TargetModel& target);

} // namespace dmdecoh
