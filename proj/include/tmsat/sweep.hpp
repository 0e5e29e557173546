#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tmsat/amplitude_matrix.hpp"
#include "tmsat/config.hpp"
#include "tmsat/turbulence.hpp"

namespace tmsat {

struct ResultRow {
  std::string table;         // "detection" or "qkd"
  double h0 = 0.0;
  double r_a = 0.0;
  std::string encoding;      // "tm" or "oam"
  int d = 0;
  double eta1 = 0.0;
  std::string compensation;  // "u-gdd", "c-gdd" or "none"
  std::vector<int> subspace;
  std::optional<double> p_e;
  std::optional<double> q;
  std::optional<double> t_avg;
  std::optional<double> c_mismatch;
  std::optional<double> k1;
  std::optional<double> k;
  bool saturated = false;
  std::optional<std::uint64_t> seed;
  std::size_t ensemble_size = 0;
  std::string status = "ok";
};

// Deterministic row order: table, h0, r_a, encoding, d, eta1, compensation.
void sort_rows(std::vector<ResultRow>& rows);

/// TM crosstalk on orders 0..8 for one ground altitude.
struct TmChannel {
  double h0 = 0.0;
  double total_gdd = 0.0;
  AmplitudeMatrix uncompensated;
  AmplitudeMatrix compensated;
  double c_tmm = 0.0;             // C_TMM
  double c_tmm_compensated = 0.0;  // C'_TMM

  const AmplitudeMatrix& crosstalk(bool compensation) const { return compensation ? compensated : uncompensated; }
};

TmChannel compute_tm_channel(const RunConfig& config, double h0);

/// Turbulence ensemble for one (h0, r_a) panel with derived averages.
struct OamChannel {
  double h0 = 0.0;
  double r_a = 0.0;
  TurbulenceEnsemble ensemble;
  double c_smm = 0.0;
  Eigen::MatrixXd mean_probabilities;  // ensemble mean of |c|^2, labels = l values
  bool from_cache = false;
};

OamChannel make_oam_channel(TurbulenceEnsemble ensemble, double h0);

using Progress = std::function<void(const std::string&)>;

/// Ensembles for every aperture radius at `h0`, loaded from the cache
/// directory when present there and simulated (then cached) otherwise.
std::vector<OamChannel> obtain_oam_channels(const RunConfig& config, double h0, std::uint64_t seed,
                                            const Progress& progress = {});

std::vector<ResultRow> run_sweep(const RunConfig& config, const Progress& progress = {});

}  // namespace tmsat
