#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <dmdecoh/atmosphere.hpp>
#include <dmdecoh/flux.hpp>
#include <dmdecoh/sensitivity.hpp>
#include <dmdecoh/statistics.hpp>
#include <dmdecoh/types.hpp>

namespace dmdecoh::cli {

struct MGrid
{
    double lo = 1e-2;
    double hi = 1e4;
    int points = 61;
};

/// "lo:hi:points".
MGrid parse_m_grid(const std::string& text);

struct StatsBlock
{
    double sTilde = 0.01;
    double gammaVis = 0.5;
    double B0 = 1e6;
    double deltaB = 0.0;
};

struct WellBlock
{
    double V0 = 1e-6;  //!< [eV]
    double R = 1.0;    //!< [nm]
};

struct RunConfig
{
    DMScenario scenario = DMScenario::with_defaults(1e6, 1.0);
    Experiment experiment = find_experiment("OTIMA");
    Site site;
    RunPlan plan{find_experiment("OTIMA")};
    AtmosphereModel atmosphere;
    StatsBlock stats;
    WellBlock well;

    FluxMode mode = FluxMode::anisotropic;
    double temperatureK = 270.0;  //!< thermalized mode
    bool greenhouse = false;
    bool debyeWaller = false;
    bool phaseRegion = false;
    std::optional<MGrid> mGrid;
    std::uint64_t seed = 20160101;
    int threads = 1;
    int points = 96;              //!< sidereal samples for `daily`
    int phases = 4;               //!< sidereal samples averaged in `sensitivity`
    std::int64_t replicas = 1000;
    double relTol = 1e-3;
    double windAngleDeg = 0.0;    //!< space mode
    double siderealPhase = 0.0;
    std::filesystem::path out = "out";
    std::filesystem::path overlay;
    bool emitPlotScript = false;
    bool json = false;

    /// Cross-field checks; throws ValidationError naming the field.
    void validate() const;
};

/// Parses the sectioned key = value format. Unknown sections and keys are rejected.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig parse_config_file(const std::filesystem::path& path, RunConfig base = {});

/// Overlay CSV with header "m_eV,alphaM" (any two leading columns), sorted by m.
Overlay read_overlay(const std::filesystem::path& path);

} // namespace dmdecoh::cli
