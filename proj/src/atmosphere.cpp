#include "tmsat/atmosphere.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <string>

#include "tmsat/constants.hpp"
#include "tmsat/error.hpp"

namespace tmsat {

namespace {

constexpr double kEarthRadiusKm = 6356.766;
constexpr double kHydrostatic = 34.1632;  // g0 M / R in K/km

// Piecewise-linear temperature segments in geopotential height (km).
struct Segment {
  double base_km;
  double base_t;
  double lapse;  // K/km
  double base_p;
};

constexpr Segment kSegments[] = {
    {0.0, 288.15, -6.5, 1013.25},     {11.0, 216.65, 0.0, 226.3226},
    {20.0, 216.65, 1.0, 54.74980},    {32.0, 228.65, 2.8, 8.680422},
    {47.0, 270.65, 0.0, 1.109106},    {51.0, 270.65, -2.8, 0.6694167},
    {71.0, 214.65, -2.0, 0.03956649},
};

AtmosphereState lower_profile(double geopotential_km) {
  int idx = 0;
  for (int s = 1; s < static_cast<int>(std::size(kSegments)); ++s) {
    if (geopotential_km > kSegments[s].base_km) idx = s;
  }
  const Segment& seg = kSegments[idx];
  const double dh = geopotential_km - seg.base_km;
  const double t = seg.base_t + seg.lapse * dh;
  double p;
  if (seg.lapse == 0.0) {
    p = seg.base_p * std::exp(-kHydrostatic * dh / seg.base_t);
  } else {
    p = seg.base_p * std::pow(seg.base_t / t, kHydrostatic / seg.lapse);
  }
  return {t, p};
}

AtmosphereState upper_profile(double h_km) {
  double t = 186.8673;
  if (h_km > 91.0) {
    const double u = (h_km - 91.0) / 19.9429;
    t = 263.1905 - 76.3232 * std::sqrt(1.0 - u * u);
  }
  const double p = std::exp(95.571899 + h_km * (-4.011801 + h_km * (6.424731e-2 + h_km * (-4.789660e-4 + h_km * 1.340543e-6))));
  return {t, p};
}

// Refractivity and its wavelength derivatives; lambda in micrometres.
struct RefractivityTerms {
  double n;     // n - 1
  double dl;    // d/dlambda
  double dl2;   // d^2/dlambda^2
  double dl3;   // d^3/dlambda^3
};

RefractivityTerms refractivity_terms(double wavelength_um, double altitude_m) {
  if (altitude_m >= kDispersiveTop) return {0.0, 0.0, 0.0, 0.0};
  const auto [t, p] = reference_profile(altitude_m);
  const double a = 77.6e-6 * p / t;
  const double b = 7.52e-3;
  const double l = wavelength_um;
  return {a * (1.0 + b / (l * l)), -2.0 * a * b / (l * l * l), 6.0 * a * b / (l * l * l * l),
          -24.0 * a * b / (l * l * l * l * l)};
}

}  // namespace

AtmosphereState reference_profile(double altitude_m) {
  if (!(altitude_m >= 0.0 && altitude_m <= kDispersiveTop)) {
    throw Error(ErrorKind::InvalidParameter,
                "reference atmosphere defined for 0..100 km, got " + std::to_string(altitude_m) + " m");
  }
  const double h_km = altitude_m * 1e-3;
  if (h_km < 86.0) return lower_profile(kEarthRadiusKm * h_km / (kEarthRadiusKm + h_km));
  return upper_profile(h_km);
}

double refractivity(double wavelength_um, double altitude_m) {
  require(wavelength_um > 0.0, "wavelength must be positive");
  require(altitude_m >= 0.0, "altitude must be non-negative");
  return refractivity_terms(wavelength_um, altitude_m).n;
}

double refractive_index(double wavelength_um, double altitude_m) {
  return 1.0 + refractivity(wavelength_um, altitude_m);
}

DispersionCoefficients dispersion_coefficients(double altitude_m, double omega0) {
  require(omega0 > 0.0, "central frequency must be positive");
  require(altitude_m >= 0.0, "altitude must be non-negative");
  const double lambda_um = wavelength_from_omega(omega0) * 1e6;
  const RefractivityTerms r = refractivity_terms(lambda_um, altitude_m);

  // Chain rule through lambda(omega) = 2 pi c / omega: dlambda/domega = -lambda/omega.
  const double w = omega0;
  const double l = lambda_um;
  const double n_w = -r.dl * l / w;
  const double n_ww = r.dl2 * (l / w) * (l / w) + r.dl * 2.0 * l / (w * w);
  const double n_www = -r.dl3 * std::pow(l / w, 3) - 6.0 * r.dl2 * l * l / (w * w * w) -
                       6.0 * r.dl * l / (w * w * w);

  DispersionCoefficients c{};
  c.k0 = (1.0 + r.n) * w / kSpeedOfLight;
  c.k1_excess = (r.n + w * n_w) / kSpeedOfLight;
  c.k1 = 1.0 / kSpeedOfLight + c.k1_excess;
  c.k2 = (2.0 * n_w + w * n_ww) / kSpeedOfLight;
  c.k3 = (3.0 * n_ww + w * n_www) / kSpeedOfLight;
  return c;
}

LayerStack::LayerStack(double ground_altitude, double satellite_altitude, double zenith_angle,
                       double omega0, std::vector<AtmosphericLayer> layers)
    : h0_(ground_altitude),
      H_(satellite_altitude),
      theta_z_(zenith_angle),
      omega0_(omega0),
      distance_((satellite_altitude - ground_altitude) / std::cos(zenith_angle)),
      layers_(std::move(layers)) {}

double LayerStack::total_gdd() const noexcept {
  double acc = 0.0;
  for (const auto& layer : layers_) acc += layer.coefficients.k2 * layer.slant_length;
  return acc;
}

double LayerStack::total_tod() const noexcept {
  double acc = 0.0;
  for (const auto& layer : layers_) acc += layer.coefficients.k3 * layer.slant_length;
  return acc;
}

double LayerStack::dispersive_path() const noexcept {
  double acc = 0.0;
  for (const auto& layer : layers_) {
    if (layer.h_lo < kDispersiveTop) acc += layer.slant_length;
  }
  return acc;
}

LayerStack build_layers(double ground_altitude, double satellite_altitude, double zenith_angle,
                        double omega0) {
  if (!(satellite_altitude > ground_altitude)) {
    throw Error(ErrorKind::InvalidGeometry, "satellite altitude must exceed ground altitude");
  }
  require(ground_altitude >= 0.0 && ground_altitude < kDispersiveTop,
          "ground altitude must lie in [0, 100 km)");
  require(satellite_altitude > kDispersiveTop, "satellite must orbit above 100 km");
  require(std::abs(zenith_angle) < kPi / 2.0, "zenith angle must be below 90 degrees");
  require(omega0 > 0.0, "central frequency must be positive");

  const double sec = 1.0 / std::cos(zenith_angle);
  std::vector<AtmosphericLayer> layers;
  double lo = ground_altitude;
  while (lo < kDispersiveTop) {
    const double hi = std::min(lo + kLayerThickness, kDispersiveTop);
    layers.push_back({lo, hi, (hi - lo) * sec, dispersion_coefficients(lo, omega0)});
    lo = hi;
  }
  layers.push_back({kDispersiveTop, satellite_altitude, (satellite_altitude - kDispersiveTop) * sec,
                    dispersion_coefficients(kDispersiveTop, omega0)});
  return {ground_altitude, satellite_altitude, zenith_angle, omega0, std::move(layers)};
}

double HufnagelValley::operator()(double h) const {
  require(h >= 0.0, "altitude must be non-negative");
  const double wind = 0.00594 * std::pow(wind_rms / 27.0, 2) * std::pow(h * 1e-5, 10) * std::exp(-h / 1000.0);
  return wind + 2.7e-16 * std::exp(-h / 1500.0) + ground_strength * std::exp(-h / 100.0);
}

double HufnagelValley::integral(double h_lo, double h_hi) const {
  require(h_lo >= 0.0 && h_hi >= h_lo, "invalid altitude interval");
  // integral of (h 1e-5)^10 exp(-h/1000) = 1e-50 * 1000^11 * Gamma(11) * P(11, h/1000)
  const double c1 = 0.00594 * std::pow(wind_rms / 27.0, 2) * 1e-17 * boost::math::tgamma(11.0);
  const double wind = c1 * (boost::math::gamma_p(11.0, h_hi / 1000.0) - boost::math::gamma_p(11.0, h_lo / 1000.0));
  const double mid = 2.7e-16 * 1500.0 * (std::exp(-h_lo / 1500.0) - std::exp(-h_hi / 1500.0));
  const double ground = ground_strength * 100.0 * (std::exp(-h_lo / 100.0) - std::exp(-h_hi / 100.0));
  return wind + mid + ground;
}

double cn2(double altitude_m, double ground_strength, double wind_rms) {
  require(ground_strength > 0.0, "turbulence strength must be positive");
  require(wind_rms > 0.0, "wind speed must be positive");
  return HufnagelValley{ground_strength, wind_rms}(altitude_m);
}

double fresnel_number_product(double transmitter_radius, double aperture_radius,
                              double wavelength, double distance) {
  require(transmitter_radius > 0.0 && aperture_radius > 0.0 && wavelength > 0.0 && distance > 0.0,
          "Fresnel number product needs positive arguments");
  const double at = kPi * transmitter_radius * transmitter_radius;
  const double ar = kPi * aperture_radius * aperture_radius;
  const double ll = wavelength * distance;
  return at * ar / (ll * ll);
}

}  // namespace tmsat
