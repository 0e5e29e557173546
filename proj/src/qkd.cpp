#include "tmsat/qkd.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "tmsat/detection.hpp"
#include "tmsat/error.hpp"
#include "tmsat/turbulence.hpp"

namespace tmsat {

Eigen::MatrixXd mub_channel_probabilities(const AmplitudeMatrix& amp, const MubSet& mubs, int beta) {
  require(amp.size() == mubs.d, "amplitude matrix dimension does not match the MUB set");
  require(beta >= 0 && beta < static_cast<int>(mubs.bases.size()), "MUB index out of range", ErrorKind::OutOfRange);
  const auto& v = mubs.bases[static_cast<std::size_t>(beta)];
  return (v.adjoint() * amp.entries() * v).cwiseAbs2();
}

double average_error(std::span<const double> per_basis_error) {
  require(!per_basis_error.empty(), "no per-basis error rates");
  CompensatedSum acc;
  for (double e : per_basis_error) acc.add(e);
  return acc.value() / static_cast<double>(per_basis_error.size());
}

namespace {
double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }
}  // namespace

KeyRate key_rate_per_photon(double q, int d) {
  require(q >= 0.0 && q <= 1.0, "average error rate must lie in [0, 1]");
  require(d >= 2, "dimension must be at least 2");
  const double dd = d;
  const double a = (dd + 1.0) / dd * q;
  const double rest = 1.0 - a;
  KeyRate out;
  if (rest < 0.0) {
    out.saturated = true;
    out.clamped = true;
    return out;
  }
  double raw = std::log2(dd) + xlog2x(rest);
  if (q > 0.0) raw += a * std::log2(q / (dd * (dd - 1.0)));
  if (raw < 0.0) {
    out.clamped = true;
    raw = 0.0;
  }
  out.k1 = raw;
  return out;
}

double secret_key_rate(double c_mismatch, double t_avg, double k1) {
  require(c_mismatch >= 0.0 && c_mismatch <= 1.0, "mismatch coefficient must lie in [0, 1]");
  require(t_avg >= 0.0 && t_avg <= 1.0, "survival fraction must lie in [0, 1]");
  require(k1 >= 0.0, "key rate per photon must be non-negative");
  return c_mismatch * t_avg * k1;
}

namespace {

QkdOutcome finish(std::vector<int> subspace, std::vector<double> p_e, std::vector<double> survival, int d,
                  double c_mismatch) {
  QkdOutcome out;
  out.subspace = std::move(subspace);
  out.q = average_error(p_e);
  out.t_avg = average_error(survival);
  out.p_e = std::move(p_e);
  out.survival = std::move(survival);
  const auto rate = key_rate_per_photon(std::min(1.0, std::max(0.0, out.q)), d);
  out.k1 = rate.k1;
  out.clamped = rate.clamped;
  out.saturated = rate.saturated;
  out.c_mismatch = c_mismatch;
  out.k = secret_key_rate(c_mismatch, std::min(1.0, out.t_avg), out.k1);
  return out;
}

}  // namespace

QkdOutcome evaluate_tm(const AmplitudeMatrix& crosstalk, std::span<const int> subspace, const MubSet& mubs,
                       double eta0, double eta1, double c_mismatch) {
  const int d = static_cast<int>(subspace.size());
  require(d == mubs.d, "subspace dimension does not match the MUB set");
  const AmplitudeMatrix sub = crosstalk.restrict(subspace);
  const Eigen::MatrixXd kernel = srt_matrix({d, eta0, eta1});
  std::vector<double> p_e, survival;
  for (int beta = 0; beta <= d; ++beta) {
    const auto total = total_probabilities(mub_channel_probabilities(sub, mubs, beta), kernel);
    p_e.push_back(error_probability(total.p_tot));
    survival.push_back(total.t_avg);
  }
  return finish({subspace.begin(), subspace.end()}, std::move(p_e), std::move(survival), d, c_mismatch);
}

QkdOutcome evaluate_oam(std::span<const AmplitudeMatrix> realizations, std::span<const int> subspace,
                        const MubSet& mubs, double c_mismatch, bool conjugate) {
  const int d = static_cast<int>(subspace.size());
  require(d == mubs.d, "subspace dimension does not match the MUB set");
  require(!realizations.empty(), "OAM protocol needs at least one realization");
  std::vector<AmplitudeMatrix> corrected;
  corrected.reserve(realizations.size());
  for (const auto& r : realizations) {
    auto sub = r.restrict(subspace);
    corrected.push_back(conjugate ? conjugation_correct(sub) : std::move(sub));
  }
  const Eigen::MatrixXd kernel = Eigen::MatrixXd::Identity(d, d);
  const double count = static_cast<double>(corrected.size());
  std::vector<double> p_e, survival;
  for (int beta = 0; beta <= d; ++beta) {
    // Accumulate in realization order so the mean does not depend on threading.
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd carry = Eigen::MatrixXd::Zero(d, d);
    for (const auto& c : corrected) {
      const Eigen::MatrixXd y = mub_channel_probabilities(c, mubs, beta) - carry;
      const Eigen::MatrixXd t = mean + y;
      carry = (t - mean) - y;
      mean = t;
    }
    mean /= count;
    const auto total = total_probabilities(mean, kernel);
    p_e.push_back(error_probability(total.p_tot));
    survival.push_back(total.t_avg);
  }
  return finish({subspace.begin(), subspace.end()}, std::move(p_e), std::move(survival), d, c_mismatch);
}

QkdOutcome evaluate_protocol(const ProtocolConfig& config) {
  const int d = static_cast<int>(config.subspace.size());
  const MubSet mubs = build_mubs(d);
  if (config.encoding == Encoding::TemporalModes) {
    require(config.crosstalk != nullptr, "TM protocol needs a crosstalk matrix");
    return evaluate_tm(*config.crosstalk, config.subspace, mubs, config.eta0, config.eta1, config.c_mismatch);
  }
  return evaluate_oam(config.realizations, config.subspace, mubs, config.c_mismatch, config.conjugate);
}

}  // namespace tmsat
