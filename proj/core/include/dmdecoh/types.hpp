#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dmdecoh {

/// Dark-matter particle, mediator and halo parameters in natural units.
struct DMScenario
{
    double M = 1e6;        //!< DM mass [eV]
    double m = 1.0;        //!< mediator mass [eV]
    double alphaM = 1.0;   //!< matter coupling
    double alphaDM = 1.0;  //!< dark coupling
    double rhoDM = 0.0;    //!< local mass density [eV^4]
    double vBar = 0.0;     //!< thermal speed [c]
    double vSun = 0.0;     //!< Solar System speed [c]
    double vEsc = 0.0;     //!< galactic escape speed [c]

    /// Common-parameter defaults for the given masses.
    static DMScenario with_defaults(double M, double m, double alphaM = 1.0);

    /// Throws ValidationError naming the offending field.
    void validate() const;

    double momentum() const { return M * vBar; }
    double number_density() const { return rhoDM / M; }
};

/// One interferometer: target geometry, superposition and count statistics.
struct Experiment
{
    std::string name;
    double radius = 0.0;        //!< target radius R [1/eV]
    double nucleons = 1.0;      //!< N
    double massNumber = 1.0;    //!< A, nucleons per nucleus
    double separation = 0.0;    //!< Delta x [1/eV]
    double exposure = 0.0;      //!< T [1/eV]
    double countRate = 0.0;     //!< Gamma [1/s]
    double visibility = 0.5;    //!< gamma_vis
    double rmsDisplacement300K = 0.0; //!< d_300K [1/eV]
    bool space = false;         //!< no Earth nearby; absolute rate is the signal

    void validate() const;
    double nuclei() const { return nucleons / massNumber; }
};

enum class ShieldingMode
{
    absorbing_earth,
    reflecting_earth,
    space
};

/// Laboratory location, superposition axis and wind direction, all in degrees.
struct Site
{
    double latitude = 48.0;
    double axisAzimuth = 70.0;
    double axisAltitude = 0.0;
    double windDeclination = 38.0;
    ShieldingMode shielding = ShieldingMode::absorbing_earth;

    void validate() const;
};

/// xiSep = 2 M vBar Delta x, xiMed = 2 M vBar / m, xiRad = 2 M vBar R.
struct DimensionlessGroups
{
    double xiSep = 0.0;
    double xiMed = 0.0;
    double xiRad = 0.0;
};

/// Reduced wavelength hbar c / E in nm.
double reduced_wavelength(double energy_eV);

DimensionlessGroups dimensionless_groups(const DMScenario& scenario, const Experiment& experiment);

/// Built-in interferometer table, smallest target first.
const std::vector<Experiment>& experiment_registry();

/// Throws ValidationError for unknown names (case-insensitive match).
const Experiment& find_experiment(std::string_view name);

ShieldingMode parse_shielding(std::string_view text);
std::string_view to_string(ShieldingMode mode);

/// Common run parameters.
namespace defaults {
inline constexpr double vBar_km_s = 230.0;
inline constexpr double vSun_km_s = 230.0;
inline constexpr double vEsc_km_s = 550.0;
inline constexpr double rho_GeV_cm3 = 0.04;
inline constexpr double alphaDM = 1.0;
inline constexpr double etaRes = 1e-3;
inline constexpr double etaDM = 0.5;
inline constexpr double runLength_s = 30.0 * 86400.0;
inline constexpr double visibility = 0.5;
} // namespace defaults

} // namespace dmdecoh
