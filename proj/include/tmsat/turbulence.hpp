#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tmsat/amplitude_matrix.hpp"
#include "tmsat/atmosphere.hpp"

namespace tmsat {

using Complex = std::complex<double>;

/// Square sampling grid of side `extent` (m) with n_xy samples per side;
/// sample i sits at (i - n_xy/2) * spacing.
struct TransverseGrid {
  std::size_t n_xy;
  double extent;
  double wavelength;

  double spacing() const noexcept { return extent / static_cast<double>(n_xy); }
  double coordinate(std::size_t i) const noexcept {
    return (static_cast<double>(i) - 0.5 * static_cast<double>(n_xy)) * spacing();
  }
  double wavenumber() const noexcept;
  void validate() const;
};

class TransverseField {
 public:
  TransverseField(TransverseGrid grid, std::vector<Complex> values);
  explicit TransverseField(TransverseGrid grid);

  const TransverseGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> values() const noexcept { return values_; }
  std::span<Complex> values() noexcept { return values_; }
  Complex& at(std::size_t ix, std::size_t iy) noexcept { return values_[iy * grid_.n_xy + ix]; }
  Complex at(std::size_t ix, std::size_t iy) const noexcept { return values_[iy * grid_.n_xy + ix]; }

  // sum |u|^2 dx dy
  double power() const noexcept;
  // Fraction of power within `band` * extent of the grid edge.
  double boundary_power_fraction(double band = 0.1) const noexcept;
  // Second-moment radius sqrt(2 <r^2>), equal to w for a Gaussian exp(-r^2/w^2).
  double second_moment_radius() const noexcept;

 private:
  TransverseGrid grid_;
  std::vector<Complex> values_;
};

/// Laguerre-Gaussian mode with radial index 0 and azimuthal index l at its
/// waist, normalized to unit power on the grid.
TransverseField lg_mode(int l, double waist, const TransverseGrid& grid);

/// Integral of conj(a) * A * b with A the hard-edged circular aperture of
/// radius aperture_radius (<= 0 means no aperture).
Complex aperture_overlap(const TransverseField& a, const TransverseField& b, double aperture_radius);

struct VonKarmanScales {
  double outer_scale = 5.0;   // m
  double inner_scale = 0.01;  // m
};

/// Modified von Karman phase PSD in cycles/m, per unit r0^(-5/3).
double von_karman_phase_psd(double f, const VonKarmanScales& scales);

/// Plane-wave Fried parameter for a path-integrated Cn^2 (m^(1/3)).
double fried_parameter(double cn2_path_integral, double wavelength);

/// Altitude slab represented by one phase screen.
struct ScreenSlab {
  double h_lo;
  double h_hi;
  double altitude;            // placement
  double cn2_path_integral;   // m^(1/3), along the slant path
};

/// Splits [h0, top] into `count` slabs of equal integrated Cn^2 and places
/// each screen at its slab's Cn^2 median. Returned in descending altitude.
std::vector<ScreenSlab> place_screens(const HufnagelValley& profile, double ground_altitude,
                                      double turbulence_top, int count, double zenith_angle);

struct PhaseScreen {
  TransverseGrid grid;
  std::vector<double> phase;  // rad, row-major, zero mean
  ScreenSlab slab;
  double r0;                  // m; +inf for a null screen
};

/// FFT phase screen with `subharmonic_levels` levels of 3x3 subharmonics.
PhaseScreen generate_screen(const ScreenSlab& slab, const TransverseGrid& grid,
                            const VonKarmanScales& scales, std::uint64_t seed,
                            int subharmonic_levels = 3);

/// Sampling of the scaled angular-spectrum propagation: the spacing varies
/// linearly from source_extent/n at z = 0 to receiver_extent/n at z = L.
struct PropagationGeometry {
  std::size_t n_xy;
  double wavelength;
  double source_extent;
  double receiver_extent;
  double path_length;
  double max_step = 0.0;  // <= 0 selects min(spacing)^2 n / lambda
};

struct PropagationPlane {
  double z;          // distance from the source (m)
  double spacing;    // grid spacing at this plane
  int screen = -1;   // index into the screen list, -1 for a vacuum plane
};

class PropagationPlan {
 public:
  // `screen_distances` are distances from the source, ascending, one per screen.
  PropagationPlan(const PropagationGeometry& geometry, std::span<const double> screen_distances);

  const PropagationGeometry& geometry() const noexcept { return geometry_; }
  std::span<const PropagationPlane> planes() const noexcept { return planes_; }
  TransverseGrid grid_at(std::size_t plane) const noexcept;
  TransverseGrid source_grid() const noexcept { return grid_at(0); }
  TransverseGrid receiver_grid() const noexcept { return grid_at(planes_.size() - 1); }
  std::size_t screen_count() const noexcept { return screen_count_; }
  // Plane index holding screen s.
  std::size_t screen_plane(std::size_t s) const;

 private:
  PropagationGeometry geometry_;
  std::vector<PropagationPlane> planes_;
  std::size_t screen_count_ = 0;
};

/// Split-step (vacuum Fresnel step + thin screen) propagation from the
/// source plane to the receiver. Screens are given in plan order (descending
/// altitude); an empty list propagates through vacuum. Throws GridExtent when
/// more than 1e-3 of the received power sits at the grid boundary.
TransverseField split_step_propagate(const TransverseField& source, const PropagationPlan& plan,
                                     std::span<const PhaseScreen> screens);

/// Removes the unitary factor of the polar decomposition C = U P, returning P.
AmplitudeMatrix conjugation_correct(const AmplitudeMatrix& matrix);

/// Physical and numerical parameters of the transverse-field simulation.
struct TurbulenceParameters {
  double wavelength = 1.064e-6;
  double beam_waist = 0.15;
  double ground_altitude = 3000.0;
  double satellite_altitude = 500e3;
  double zenith_angle = 0.0;
  double ground_strength = 9.6e-14;
  double wind_rms = 21.0;
  VonKarmanScales scales{};
  double turbulence_top = 30e3;
  int screen_count = 10;
  int subharmonic_levels = 3;
  std::size_t n_xy = 512;
  double source_extent = 7.68;
  double receiver_extent = 25.6;
  double max_step = 0.0;
  std::vector<int> l_values{-4, -3, -2, -1, 0, 1, 2, 3, 4};

  double path_length() const;
};

struct RealizationRecord {
  AmplitudeMatrix oam;  // labels = l_values, includes the aperture
  double smm;           // |<psi_0 vac | A | psi_0 turb>|^2
};

struct TurbulenceEnsemble {
  std::uint64_t seed = 0;
  TurbulenceParameters parameters;
  double aperture_radius = 0.0;
  std::vector<RealizationRecord> realizations;
};

/// Owns the propagation plan, screen slabs and vacuum-propagated reference
/// modes for one parameter set. Immutable after construction.
class TurbulenceSimulator {
 public:
  explicit TurbulenceSimulator(TurbulenceParameters parameters);

  const TurbulenceParameters& parameters() const noexcept { return parameters_; }
  const PropagationPlan& plan() const noexcept { return plan_; }
  std::span<const ScreenSlab> slabs() const noexcept { return slabs_; }
  const TransverseField& source_mode(std::size_t i) const { return source_modes_.at(i); }
  const TransverseField& vacuum_mode(std::size_t i) const { return vacuum_modes_.at(i); }

  // Screens of realization `index`, seeded deterministically from (seed, index).
  std::vector<PhaseScreen> screens(std::uint64_t seed, std::uint64_t index) const;

  // Received fields for every l value.
  std::vector<TransverseField> received_fields(std::span<const PhaseScreen> screens) const;

  // Aperture-weighted projections onto the vacuum reference modes.
  RealizationRecord project(std::span<const TransverseField> received, double aperture_radius) const;

  RealizationRecord realization(std::span<const PhaseScreen> screens, double aperture_radius) const;

  // One ensemble per aperture radius, sharing the turbulence realizations.
  std::vector<TurbulenceEnsemble> simulate(std::uint64_t seed, std::size_t count,
                                           std::span<const double> aperture_radii,
                                           unsigned threads = 0) const;

 private:
  TurbulenceParameters parameters_;
  std::vector<ScreenSlab> slabs_;
  PropagationPlan plan_;
  std::vector<TransverseField> source_modes_;
  std::vector<TransverseField> vacuum_modes_;
};

/// Convenience wrapper building the realization with a one-off simulator.
AmplitudeMatrix oam_crosstalk_realization(const TurbulenceSimulator& simulator,
                                          std::span<const PhaseScreen> screens,
                                          double aperture_radius);

/// Mean of the per-realization smm samples (compensated summation).
double smm_coefficient(const TurbulenceEnsemble& ensemble);

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

}  // namespace tmsat
