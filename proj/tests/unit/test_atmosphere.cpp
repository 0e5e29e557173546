#include <doctest.h>

#include <cmath>

#include "tmsat/atmosphere.hpp"
#include "tmsat/constants.hpp"
#include "tmsat/error.hpp"

using namespace tmsat;

namespace {
const double kOmega0 = angular_frequency(1.064e-6);
}

TEST_CASE("reference profile") {
  const auto s = reference_profile(0.0);
  CHECK(s.temperature_k == doctest::Approx(288.15).epsilon(1e-12));
  CHECK(s.pressure_hpa == doctest::Approx(1013.25).epsilon(1e-12));
  CHECK_THROWS_AS(reference_profile(-1.0), Error);
  CHECK_THROWS_AS(reference_profile(100.1e3), Error);

  double prev = 2000.0;
  for (double h = 0; h <= 100e3; h += 50.0) {
    const double p = reference_profile(h).pressure_hpa;
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("temperature continuity across segment boundaries") {
  // Geometric altitudes of the geopotential breakpoints 11, 20, 32, 47, 51, 71 km'.
  for (double hp : {11.0, 20.0, 32.0, 47.0, 51.0, 71.0}) {
    const double h = 6356.766 * hp / (6356.766 - hp) * 1e3;
    const double jump = std::abs(reference_profile(h + 1e-3).temperature_k - reference_profile(h - 1e-3).temperature_k);
    CHECK(jump < 0.01);
  }
  for (double h : {91e3}) {
    CHECK(std::abs(reference_profile(h + 1e-3).temperature_k - reference_profile(h - 1e-3).temperature_k) < 0.01);
  }
  // The published standard joins its 86 km formula with a small offset.
  CHECK(std::abs(reference_profile(86e3 + 1e-3).temperature_k - reference_profile(86e3 - 1e-3).temperature_k) < 0.1);
  CHECK(std::abs(reference_profile(86e3 + 1e-3).pressure_hpa / reference_profile(86e3 - 1e-3).pressure_hpa - 1.0) < 0.02);
}

TEST_CASE("refractive index") {
  CHECK(refractive_index(1.064, 0.0) == doctest::Approx(1.0002747).epsilon(1e-7));
  // Oracle: direct evaluation of the dry-air formula with sea-level values.
  const double direct = 77.6e-6 * (1 + 7.52e-3 / (1.064 * 1.064)) * 1013.25 / 288.15;
  CHECK(refractivity(1.064, 0.0) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(refractive_index(1.064, 100e3) == 1.0);
  CHECK(refractive_index(1.064, 250e3) == 1.0);
  CHECK(refractive_index(0.8, 0.0) > refractive_index(1.064, 0.0));
  double prev = 1.0;
  for (double h = 0; h < 100e3; h += 500) {
    const double n1 = refractivity(1.064, h);
    CHECK(n1 < prev);
    prev = n1;
  }
}

TEST_CASE("dispersion coefficients match finite differences") {
  for (double h : {0.0, 3000.0, 20e3, 60e3}) {
    const auto c = dispersion_coefficients(h, kOmega0);
    auto k = [&](double w) {
      return (1.0 + refractivity(wavelength_from_omega(w) * 1e6, h)) * w / kSpeedOfLight;
    };
    const double dw = 1e-4 * kOmega0;
    const double k1_fd = (k(kOmega0 + dw) - k(kOmega0 - dw)) / (2 * dw);
    CHECK(std::abs(c.k1 / k1_fd - 1.0) < 1e-6);
    // k2 from differences of the excess part only (avoids cancelling the 1/c slope).
    auto ex = [&](double w) { return refractivity(wavelength_from_omega(w) * 1e6, h) * w / kSpeedOfLight; };
    const double k2_fd = (ex(kOmega0 + dw) - 2 * ex(kOmega0) + ex(kOmega0 - dw)) / (dw * dw);
    CHECK(std::abs(c.k2 / k2_fd - 1.0) < 1e-6);
    CHECK(std::abs(c.k1_excess - (c.k1 - 1.0 / kSpeedOfLight)) < 1e-20);
  }
  CHECK(dispersion_coefficients(0.0, kOmega0).k2 > 0.0);
  const auto vac = dispersion_coefficients(120e3, kOmega0);
  CHECK(vac.k1 == 1.0 / kSpeedOfLight);
  CHECK(vac.k2 == 0.0);
}

TEST_CASE("layer stack geometry") {
  const auto s = build_layers(0.0, 500e3, 0.0, kOmega0);
  CHECK(s.layers().size() == 101);
  CHECK(s.layers()[0].slant_length == doctest::Approx(1000.0));
  CHECK(s.total_distance() == doctest::Approx(500e3));
  CHECK(s.dispersive_path() == doctest::Approx(100e3).epsilon(1e-14));
  for (std::size_t i = 1; i < s.layers().size(); ++i) CHECK(s.layers()[i].h_lo == s.layers()[i - 1].h_hi);
  CHECK(s.layers().back().h_lo == 100e3);
  CHECK(s.layers().back().h_hi == 500e3);

  const auto s3 = build_layers(3000.0, 500e3, 0.0, kOmega0);
  CHECK(s3.layers()[0].h_lo == 3000.0);
  CHECK(s3.layers()[0].h_hi == 4000.0);
  CHECK(s3.dispersive_path() == doctest::Approx(97e3).epsilon(1e-14));

  const auto tilted = build_layers(0.0, 500e3, kPi / 3, kOmega0);
  for (std::size_t i = 0; i < s.layers().size(); ++i)
    CHECK(tilted.layers()[i].slant_length == doctest::Approx(2 * s.layers()[i].slant_length).epsilon(1e-12));

  const auto partial = build_layers(2500.0, 500e3, 0.0, kOmega0);
  CHECK(partial.layers()[96].h_lo == 98500.0);
  CHECK(partial.layers()[97].h_lo == 99500.0);
  CHECK(partial.layers()[97].h_hi == 100e3);
  CHECK(partial.dispersive_path() == doctest::Approx(97.5e3).epsilon(1e-14));

  CHECK(s.total_gdd() > 0.0);
  CHECK(s3.total_gdd() < s.total_gdd());
  CHECK_THROWS_AS(build_layers(3000.0, 3000.0, 0.0, kOmega0), Error);
  try {
    build_layers(3000.0, 1000.0, 0.0, kOmega0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidGeometry);
  }
}

TEST_CASE("Hufnagel-Valley profile") {
  CHECK(cn2(0.0, 9.6e-14, 21.0) == doctest::Approx(9.627e-14).epsilon(1e-4));
  CHECK(cn2(1e6, 9.6e-14, 21.0) < 1e-30);
  for (double h : {0.0, 1.0, 10.0}) CHECK(cn2(h, 9.6e-14, 21.0) >= 9.6e-14 * std::exp(-h / 100) * (1 - 1e-12));
  const HufnagelValley hv{9.6e-14, 21.0};
  // Closed-form integral against composite Simpson.
  for (auto [lo, hi] : {std::pair{0.0, 30e3}, std::pair{3000.0, 30e3}, std::pair{500.0, 2500.0}}) {
    const int n = 200000;
    const double dh = (hi - lo) / n;
    double acc = hv(lo) + hv(hi);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4 : 2) * hv(lo + i * dh);
    CHECK(hv.integral(lo, hi) == doctest::Approx(acc * dh / 3).epsilon(1e-8));
  }
}

TEST_CASE("Fresnel number product") {
  const double d1 = fresnel_number_product(0.15, 1.0, 1.064e-6, 5e5);
  const double d4 = fresnel_number_product(0.15, 4.0, 1.064e-6, 5e5);
  CHECK(std::abs(d1 / 0.7 - 1) < 0.15);
  CHECK(std::abs(d4 / 12 - 1) < 0.15);
  CHECK(fresnel_number_product(0.15, 2.0, 1.064e-6, 5e5) == doctest::Approx(4 * d1).epsilon(1e-14));
}
