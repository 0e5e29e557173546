#pragma once

#include <span>
#include <vector>

namespace tmsat {

/// Upper altitude of the dispersive atmosphere; the mean index is exactly 1
/// at and above it.
inline constexpr double kDispersiveTop = 100e3;  // m
inline constexpr double kLayerThickness = 1e3;   // m

struct AtmosphereState {
  double temperature_k;
  double pressure_hpa;
};

/// ITU-R P.835-6 mean annual global reference atmosphere, 0 <= h <= 100 km.
AtmosphereState reference_profile(double altitude_m);

/// Refractivity n - 1 of dry air (wavelength in micrometres).
double refractivity(double wavelength_um, double altitude_m);

/// Mean refractive index; exactly 1 at altitudes >= 100 km.
double refractive_index(double wavelength_um, double altitude_m);

/// Taylor coefficients of k(omega) = n(omega) omega / c at omega0.
struct DispersionCoefficients {
  double k0;         // rad/m
  double k1;         // s/m, inverse group velocity
  double k2;         // s^2/m, GDD per length
  double k3;         // s^3/m, TOD per length
  double k1_excess;  // s/m, k1 - 1/c evaluated without cancellation
};

DispersionCoefficients dispersion_coefficients(double altitude_m, double omega0);

struct AtmosphericLayer {
  double h_lo;
  double h_hi;
  double slant_length;
  DispersionCoefficients coefficients;  // evaluated at h_lo
};

class LayerStack {
 public:
  LayerStack(double ground_altitude, double satellite_altitude, double zenith_angle, double omega0,
             std::vector<AtmosphericLayer> layers);

  double ground_altitude() const noexcept { return h0_; }
  double satellite_altitude() const noexcept { return H_; }
  double zenith_angle() const noexcept { return theta_z_; }
  double omega0() const noexcept { return omega0_; }
  std::span<const AtmosphericLayer> layers() const noexcept { return layers_; }
  double total_distance() const noexcept { return distance_; }

  // Sum of k2 L over all layers.
  double total_gdd() const noexcept;
  // Sum of k3 L over all layers.
  double total_tod() const noexcept;
  // Sum of L over layers below the dispersive top.
  double dispersive_path() const noexcept;

 private:
  double h0_;
  double H_;
  double theta_z_;
  double omega0_;
  double distance_;
  std::vector<AtmosphericLayer> layers_;
};

/// 1 km layers from h0 to 100 km (the last may be partial) plus a single
/// vacuum layer up to the satellite.
LayerStack build_layers(double ground_altitude, double satellite_altitude, double zenith_angle,
                        double omega0);

/// Hufnagel-Valley turbulence profile.
struct HufnagelValley {
  double ground_strength;  // A, m^(-2/3)
  double wind_rms;         // m/s

  double operator()(double altitude_m) const;
  // Integral of Cn^2 over [h_lo, h_hi] along the vertical (closed form).
  double integral(double h_lo, double h_hi) const;
};

double cn2(double altitude_m, double ground_strength, double wind_rms);

/// Fresnel number product (pi r_T^2)(pi r_a^2)/(lambda L)^2.
double fresnel_number_product(double transmitter_radius, double aperture_radius,
                              double wavelength, double distance);

}  // namespace tmsat
