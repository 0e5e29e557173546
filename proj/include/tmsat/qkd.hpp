#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "tmsat/amplitude_matrix.hpp"
#include "tmsat/mub.hpp"
#include "tmsat/sorter.hpp"

namespace tmsat {

/// P(r|s) = |(V^H C V)(r, s)|^2 for basis `beta` (0 = standard basis).
Eigen::MatrixXd mub_channel_probabilities(const AmplitudeMatrix& amp, const MubSet& mubs, int beta);

double average_error(std::span<const double> per_basis_error);

struct KeyRate {
  double k1 = 0.0;
  bool clamped = false;  // raw rate was negative and has been set to 0
  bool saturated = false;  // 1 - (d+1)Q/d < 0: formula outside its validity
};

// Asymptotic d+1-MUB key rate per detected photon.
KeyRate key_rate_per_photon(double q, int d);

double secret_key_rate(double c_mismatch, double t_avg, double k1);

struct QkdOutcome {
  std::vector<int> subspace;
  std::vector<double> p_e;       // per MUB
  std::vector<double> survival;  // per MUB
  double q = 0.0;
  double t_avg = 0.0;
  double k1 = 0.0;
  double c_mismatch = 0.0;
  double k = 0.0;
  bool clamped = false;
  bool saturated = false;
};

enum class Encoding { TemporalModes, OrbitalAngularMomentum };

/// TM protocol: a single crosstalk matrix, each MUB sorted by a d-gate
/// sorter with the given efficiencies; c_mismatch is C_SMM.
QkdOutcome evaluate_tm(const AmplitudeMatrix& crosstalk, std::span<const int> subspace, const MubSet& mubs,
                       double eta0, double eta1, double c_mismatch);

/// OAM protocol: per-realization crosstalk (optionally conjugation
/// corrected), probabilities averaged over realizations, perfect sorter;
/// c_mismatch is C_TMM or C'_TMM.
QkdOutcome evaluate_oam(std::span<const AmplitudeMatrix> realizations, std::span<const int> subspace,
                        const MubSet& mubs, double c_mismatch, bool conjugate = true);

struct ProtocolConfig {
  Encoding encoding = Encoding::TemporalModes;
  std::vector<int> subspace;
  double c_mismatch = 1.0;
  // TM
  const AmplitudeMatrix* crosstalk = nullptr;
  double eta0 = 0.9;
  double eta1 = 0.0;
  // OAM
  std::span<const AmplitudeMatrix> realizations{};
  bool conjugate = true;
};

QkdOutcome evaluate_protocol(const ProtocolConfig& config);

}  // namespace tmsat
