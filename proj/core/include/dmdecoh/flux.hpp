#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "dmdecoh/types.hpp"
#include "dmdecoh/vec3.hpp"

namespace dmdecoh {

enum class FluxMode
{
    anisotropic,
    isotropized,
    thermalized
};

FluxMode parse_flux_mode(std::string_view text);
std::string_view to_string(FluxMode mode);

/// Laboratory-frame DM momentum distribution.
///
/// Earth-bound sites take their geometry from the site and sidereal phase; in
/// space mode the wind direction relative to the separation axis is given by
/// the wind angle passed to the rate and sampling routines.
struct FluxModel
{
    DMScenario scenario;
    Site site;
    FluxMode mode = FluxMode::anisotropic;
    double temperature = 0.0;   //!< [eV], thermalized mode only
    double siderealPhase = 0.0; //!< in [0, 1)

    void validate() const;
    bool masked() const { return site.shielding != ShieldingMode::space; }
};

/// Normalization of the truncated, shifted Maxwellian in reduced speed s = k/(M vBar).
double speed_pdf_normalization(const DMScenario& scenario);

/// Number-flux fractions relative to the unshielded halo.
struct HorizonFraction
{
    double downward = 1.0;  //!< in [0, 1]: flux arriving from above the horizon
    double reflected = 0.0; //!< re-emitted upward flux (reflecting mode)
    double total() const { return downward + reflected; }
};

HorizonFraction horizon_flux_fraction(const DMScenario& scenario, const Site& site,
                                      double siderealPhase);

/// Unit vectors of the lab at a sidereal phase, in equatorial coordinates.
struct LabFrame
{
    Vec3 zenith;
    Vec3 axis; //!< separation direction
    Vec3 wind; //!< mean DM velocity direction
};

LabFrame lab_frame(const Site& site, double siderealPhase);

/// Angular density in reduced momentum space, relative to the separation axis.
///
/// angular(s, c) integrates n(s k) over the azimuth about the axis at fixed
/// c = cos(k, axis); total(s) integrates it over the sphere, so that the
/// integral of s^2 total(s) is the number-density fraction that survives shielding.
class DirectionalDensity
{
  public:
    DirectionalDensity(const FluxModel& model, double windAngle);

    enum class Kind
    {
        unmasked, //!< shifted Maxwellian, full sphere
        masked,   //!< horizon-masked, optionally with Lambertian reflection
        isotropic //!< angle-averaged or thermal
    };

    Kind kind() const { return kind_; }
    double s_max() const { return sMax_; }
    std::vector<double> s_breaks() const;
    std::vector<double> c_breaks() const;

    double total(double s) const;
    /// Per-steradian density of the reflected component at speed s.
    double reflected(double s) const;
    double angular(double s, double c) const;
    /// As angular(), with reflected(s) precomputed by the caller.
    double angular(double s, double c, double reflectedAtS) const;

    // Parameters of the unmasked Maxwellian.
    double normalization() const { return Z_; }
    double drift() const { return w_; }
    double drift_cosine() const { return dot(windDir_, axis_); }
    double thermal_width() const { return a_; }

  private:
    double down_arc_integral(double s, double c, double* arcLength) const;
    double halo_total_down(double s) const;

    Kind kind_;
    bool thermal_ = false;
    bool reflect_ = false;
    double Z_ = 0.0;
    double w_ = 0.0;
    double a_ = 1.0;
    double sMax_ = 0.0;
    Vec3 axis_{0, 0, 1};
    Vec3 e1_{1, 0, 0};
    Vec3 e2_{0, 1, 0};
    Vec3 windDir_{0, 0, 1};
    Vec3 up_{0, 0, 1};
    FluxMode mode_ = FluxMode::anisotropic;
    bool maskedHalo_ = false;
};

/// Draws momentum vectors [eV] in the frame of DirectionalDensity.
class MomentumSampler
{
  public:
    MomentumSampler(const FluxModel& model, double windAngle);
    Vec3 operator()(std::mt19937_64& rng) const;
    const Vec3& axis() const { return axis_; }

  private:
    Vec3 halo_velocity(std::mt19937_64& rng) const;
    Vec3 shielded_velocity(std::mt19937_64& rng) const;

    FluxModel model_;
    double w_ = 0.0;
    double uEsc_ = 0.0;
    Vec3 axis_{0, 0, 1};
    Vec3 windDir_{0, 0, 1};
    Vec3 up_{0, 0, 1};
    bool masked_ = false;
    double reflectProb_ = 0.0;
};

/// One momentum sample; deterministic in the seed.
Vec3 sample_momentum(const FluxModel& model, std::uint64_t seed, double windAngle = 0.0);

/// Density-weighted fractions {downward, reflected} of the shielded halo.
HorizonFraction horizon_density_fraction(const DMScenario& scenario, const Site& site,
                                         double siderealPhase);

struct SiderealSeries
{
    std::vector<double> times;
    std::vector<double> values;

    double mean() const;
    double half_peak_to_peak() const;
    void validate() const;
};

/// (max - min) / (max + min).
double daily_variation(const SiderealSeries& series);

/// Uniform phase grid in [0, 1).
std::vector<double> sidereal_grid(int points);

} // namespace dmdecoh
