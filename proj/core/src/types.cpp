#include "dmdecoh/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "dmdecoh/errors.hpp"
#include "dmdecoh/units.hpp"

namespace dmdecoh {

namespace {

void require(bool ok, const char* field, const char* what)
{
    if (!ok)
        throw ValidationError(field, what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size()
           && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
                  return std::tolower(static_cast<unsigned char>(x))
                         == std::tolower(static_cast<unsigned char>(y));
              });
}

Experiment make_row(const char* name, double R_nm, double N, double A, double dx_nm, double T_ms,
                    double rate, double d300_A, bool space = false)
{
    Experiment e;
    e.name = name;
    e.radius = R_nm * units::nm;
    e.nucleons = N;
    e.massNumber = A;
    e.separation = dx_nm * units::nm;
    e.exposure = T_ms * units::ms;
    e.countRate = rate;
    e.visibility = defaults::visibility;
    e.rmsDisplacement300K = d300_A * units::angstrom;
    e.space = space;
    return e;
}

} // namespace

DMScenario DMScenario::with_defaults(double M, double m, double alphaM)
{
    DMScenario s;
    s.M = M;
    s.m = m;
    s.alphaM = alphaM;
    s.alphaDM = defaults::alphaDM;
    s.rhoDM = defaults::rho_GeV_cm3 * units::GeV_per_cm3;
    s.vBar = defaults::vBar_km_s * units::km_s;
    s.vSun = defaults::vSun_km_s * units::km_s;
    s.vEsc = defaults::vEsc_km_s * units::km_s;
    return s;
}

void DMScenario::validate() const
{
    require(finite_positive(M), "scenario.M", "must be > 0");
    require(finite_positive(m), "scenario.m", "must be > 0");
    require(std::isfinite(alphaM) && alphaM >= 0.0, "scenario.alphaM", "must be >= 0");
    require(finite_positive(alphaDM), "scenario.alphaDM", "must be > 0");
    require(finite_positive(rhoDM), "scenario.rhoDM", "must be > 0");
    require(finite_positive(vBar) && vBar < vEsc, "scenario.vBar", "must satisfy 0 < vBar < vEsc");
    require(std::isfinite(vSun) && vSun >= 0.0 && vSun < vEsc, "scenario.vSun",
            "must satisfy 0 <= vSun < vEsc");
    require(std::isfinite(vEsc) && vEsc < 1.0, "scenario.vEsc", "must be < 1 (fraction of c)");
}

void Experiment::validate() const
{
    require(finite_positive(radius), "experiment.R", "must be > 0");
    require(std::isfinite(separation) && separation >= 0.0, "experiment.dx", "must be >= 0");
    require(finite_positive(exposure), "experiment.T", "must be > 0");
    require(finite_positive(countRate), "experiment.Gamma", "must be > 0");
    require(std::isfinite(visibility) && visibility > 0.0 && visibility <= 1.0,
            "experiment.visibility", "must lie in (0, 1]");
    require(std::isfinite(massNumber) && massNumber >= 1.0, "experiment.A", "must be >= 1");
    require(std::isfinite(nucleons) && nucleons >= massNumber, "experiment.N", "must be >= A");
    require(std::isfinite(rmsDisplacement300K) && rmsDisplacement300K >= 0.0,
            "experiment.d300K", "must be >= 0");
}

void Site::validate() const
{
    require(std::isfinite(latitude) && std::abs(latitude) <= 90.0, "site.latitude",
            "must lie in [-90, 90]");
    require(std::isfinite(windDeclination) && std::abs(windDeclination) <= 90.0,
            "site.windDeclination", "must lie in [-90, 90]");
    require(std::isfinite(axisAzimuth), "site.axisAzimuth", "must be finite");
    require(std::isfinite(axisAltitude) && std::abs(axisAltitude) <= 90.0, "site.axisAltitude",
            "must lie in [-90, 90]");
}

double reduced_wavelength(double energy_eV)
{
    if (!(energy_eV > 0.0))
        throw ValidationError("energy", "must be > 0");
    return units::hbar_c_eV_nm / energy_eV;
}

DimensionlessGroups dimensionless_groups(const DMScenario& scenario, const Experiment& experiment)
{
    scenario.validate();
    experiment.validate();
    const double twoK = 2.0 * scenario.momentum();
    return {twoK * experiment.separation, twoK / scenario.m, twoK * experiment.radius};
}

const std::vector<Experiment>& experiment_registry()
{
    // Mass numbers are per-nucleus averages of the composition; d300K values are
    // representative room-temperature rms displacements for each material.
    static const std::vector<Experiment> table = {
        make_row("KDTL", 1.0, 1.0e4, 1e4 / 810.0, 266.0, 1.24, 1e4, 0.2),
        make_row("OTIMA", 5.0, 6e6, 197.0, 78.5, 94.0, 600.0, 0.09),
        make_row("Bateman", 5.5, 1.1e6, 28.0, 150.0, 140.0, 0.5, 0.075),
        make_row("Geraci", 6.5, 1.6e6, 20.0, 250.0, 250.0, 0.5, 0.1),
        make_row("Wan", 95.0, 7.5e9, 12.0, 100.0, 0.05, 1.0, 0.05),
        make_row("MAQRO", 120.0, 1e10, 20.0, 100.0, 1e5, 0.01, 0.1, true),
        make_row("Pino", 1000.0, 2.2e13, 93.0, 290.0, 450.0, 0.1, 0.08),
    };
    return table;
}

const Experiment& find_experiment(std::string_view name)
{
    for (const auto& e : experiment_registry())
        if (iequals(e.name, name))
            return e;
    throw ValidationError("experiment", "unknown experiment '" + std::string(name) + "'");
}

ShieldingMode parse_shielding(std::string_view text)
{
    if (iequals(text, "absorbing") || iequals(text, "absorbing-earth"))
        return ShieldingMode::absorbing_earth;
    if (iequals(text, "reflecting") || iequals(text, "reflecting-earth"))
        return ShieldingMode::reflecting_earth;
    if (iequals(text, "space"))
        return ShieldingMode::space;
    throw ValidationError("site.shielding", "expected absorbing, reflecting or space");
}

std::string_view to_string(ShieldingMode mode)
{
    switch (mode) {
    case ShieldingMode::absorbing_earth: return "absorbing";
    case ShieldingMode::reflecting_earth: return "reflecting";
    case ShieldingMode::space: return "space";
    }
    return "absorbing";
}

} // namespace dmdecoh
