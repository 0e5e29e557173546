#pragma once

#include <numbers>

namespace tmsat {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Angular frequency (rad/s) of light with vacuum wavelength `wavelength_m`.
constexpr double angular_frequency(double wavelength_m) {
  return kTwoPi * kSpeedOfLight / wavelength_m;
}

constexpr double wavelength_from_omega(double omega) {
  return kTwoPi * kSpeedOfLight / omega;
}

}  // namespace tmsat
