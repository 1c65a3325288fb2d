#pragma once

#include <numbers>

/// Natural units: hbar = c = k_B = 1, energies in eV, lengths and times in 1/eV.
namespace dmdecoh::units {

inline constexpr double pi = std::numbers::pi;

/// hbar*c [eV nm]
inline constexpr double hbar_c_eV_nm = 197.3269804;
/// hbar [eV s]
inline constexpr double hbar_eV_s = 6.582119569e-16;
/// c [m/s]
inline constexpr double c_m_s = 299792458.0;
/// k_B [eV/K]
inline constexpr double kB_eV_K = 8.617333262e-5;
/// 1 GeV/c^2 in kg
inline constexpr double GeV_kg = 1.78266192e-27;
/// Atomic mass unit [eV]
inline constexpr double amu_eV = 931.49410242e6;

inline constexpr double eV = 1.0;
inline constexpr double keV = 1e3;
inline constexpr double MeV = 1e6;
inline constexpr double GeV = 1e9;

// Lengths.
inline constexpr double nm = 1.0 / hbar_c_eV_nm;
inline constexpr double angstrom = 0.1 * nm;
inline constexpr double m = 1e9 * nm;
inline constexpr double cm = 1e7 * nm;

// Times.
inline constexpr double s = 1.0 / hbar_eV_s;
inline constexpr double ms = 1e-3 * s;
inline constexpr double day = 86400.0 * s;

// Speeds as a fraction of c.
inline constexpr double km_s = 1e3 / c_m_s;

/// GeV/cm^3 expressed in eV^4.
inline constexpr double GeV_per_cm3 = GeV / (cm * cm * cm);

inline constexpr double kelvin = kB_eV_K;

/// Convert a rate in eV to 1/s.
constexpr double rate_per_s(double rate_eV) { return rate_eV / hbar_eV_s; }
/// Convert an area in 1/eV^2 to cm^2.
constexpr double area_cm2(double area_natural) { return area_natural / (cm * cm); }

} // namespace dmdecoh::units
