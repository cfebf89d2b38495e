#pragma once

#include <numbers>

namespace fiberdeco {

// Vacuum speed of light, exact by definition.
inline constexpr double speed_of_light = 299'792'458.0;  // m/s

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// FWHM time-bandwidth product of a transform-limited gaussian (2 ln2 / pi,
// ~0.441). Coherence times quoted by this library use this convention:
// tau_c = gaussian_time_bandwidth / dnu_fwhm.
inline constexpr double gaussian_time_bandwidth = 2.0 * std::numbers::ln2 / std::numbers::pi;

// SI value of one of each unit used in configs and reports.
namespace units {
inline constexpr double nm = 1e-9;   // m
inline constexpr double um = 1e-6;   // m
inline constexpr double km = 1e3;    // m
inline constexpr double ps = 1e-12;  // s
inline constexpr double fs = 1e-15;  // s
inline constexpr double ghz = 1e9;   // Hz

// Birefringence magnitude: 1 ps/km in s/m.
inline constexpr double ps_per_km = 1e-15;
// PMD coefficient: 1 ps/sqrt(km) in s/sqrt(m).
inline constexpr double ps_per_sqrt_km = 1e-12 / 31.622776601683793;
// Dispersion slope S0: 1 ps/(nm^2 km) in s/m^3.
inline constexpr double ps_per_nm2_km = 1e3;
}  // namespace units

inline double omega_from_wavelength(double lambda_m) {
  return two_pi * speed_of_light / lambda_m;
}

inline double wavelength_from_omega(double omega_rad_s) {
  return two_pi * speed_of_light / omega_rad_s;
}

}  // namespace fiberdeco
