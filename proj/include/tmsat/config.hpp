#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tmsat/turbulence.hpp"

namespace tmsat {

struct PhysicalConfig {
  double wavelength = 1.064e-6;       // m
  double pulse_duration = 200e-15;    // s, T0
  double satellite_altitude = 500e3;  // m
  double zenith_angle = 0.0;          // rad
  std::vector<double> ground_altitudes{3000.0};  // m, one panel per (h0, r_a)
  std::vector<double> aperture_radii{4.0};       // m
  double beam_waist = 0.15;           // m
  double ground_strength = 9.6e-14;   // m^(-2/3)
  double wind_rms = 21.0;             // m/s
  double outer_scale = 5.0;           // m
  double inner_scale = 0.01;          // m
};

struct NumericalConfig {
  std::size_t spectral_points = 4096;
  double span_sigmas = 12.0;
  std::size_t n_xy = 512;
  double source_extent = 7.68;
  double receiver_extent = 25.6;
  double turbulence_top = 30e3;
  int screen_count = 10;
  int subharmonic_levels = 3;
  std::size_t ensemble_size = 500;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

struct SweepConfig {
  int d_min = 2;
  int d_max = 9;
  double eta0 = 0.9;
  std::vector<double> eta1_qkd;        // default 0..0.3 step 0.01
  std::vector<double> eta1_detection;  // default 0..eta0 step 0.01
  bool uncompensated = true;
  bool compensated = true;
  bool detection_table = true;
  bool qkd_table = true;
  bool tm = true;
  bool oam = true;
  std::optional<double> c_smm;  // fixed C_SMM for TM key rates; unset: from the ensemble
};

struct OutputConfig {
  std::filesystem::path directory = "results";
  std::string basename = "results";
  bool csv = true;
  bool json = true;
  bool plot_data = true;
  std::filesystem::path cache_directory;  // empty: TMSAT_CACHE_DIR or no cache
};

struct RunConfig {
  PhysicalConfig physical;
  NumericalConfig numerical;
  SweepConfig sweep;
  OutputConfig output;

  void validate() const;
  TurbulenceParameters turbulence(double ground_altitude) const;
};

// Reference defaults, with the default eta1 grids filled in.
RunConfig default_config();

// "start:stop:step" (inclusive) or a comma list; empty text gives an empty grid.
std::vector<double> parse_grid(const std::string& text);
std::string format_grid(const std::vector<double>& grid);

/// Reads an INI file ([physical], [numerical], [sweep], [output]); keys not
/// present keep their defaults. Unknown keys are rejected.
RunConfig load_config(const std::filesystem::path& path);

/// Applies "section.key=value" overrides.
void apply_override(RunConfig& config, const std::string& assignment);

void save_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace tmsat
