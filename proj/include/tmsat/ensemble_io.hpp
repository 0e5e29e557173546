#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "tmsat/turbulence.hpp"

namespace tmsat {

inline constexpr std::uint32_t kEnsembleFormatVersion = 1;

/// Canonical JSON text describing everything that determines an ensemble
/// apart from the seed: turbulence parameters, aperture radius and count.
std::string ensemble_snapshot(const TurbulenceParameters& parameters, double aperture_radius, std::size_t count);

/// Binary cache layout (little-endian):
///   "TMSATENS" | u32 version | u64 snapshot length | snapshot bytes |
///   u64 seed | u64 realization count | u64 label count | i32 labels... |
///   per realization: f64 smm, then d*d (f64 re, f64 im) column-major |
///   u32 CRC-32 of every preceding byte.
void save_ensemble(const TurbulenceEnsemble& ensemble, const std::filesystem::path& path);

/// Reads a cache file and checks it against the expected parameters and
/// seed; throws ParameterMismatch, VersionMismatch, Checksum or Io.
TurbulenceEnsemble load_ensemble(const std::filesystem::path& path, const TurbulenceParameters& expected,
                                 double aperture_radius, std::size_t count, std::uint64_t seed);

// Reads a cache file without a parameter check (still verifies checksum and version).
TurbulenceEnsemble read_ensemble(const std::filesystem::path& path);

// File name encoding the snapshot hash and the seed.
std::filesystem::path ensemble_cache_path(const std::filesystem::path& directory, const TurbulenceParameters& parameters,
                                          double aperture_radius, std::size_t count, std::uint64_t seed);

}  // namespace tmsat
