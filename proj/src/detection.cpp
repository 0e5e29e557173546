#include "tmsat/detection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tmsat/error.hpp"

namespace tmsat {

TotalProbabilities total_probabilities(const Eigen::MatrixXd& p_ch, const Eigen::MatrixXd& p_srt) {
  require(p_ch.rows() == p_ch.cols() && p_srt.rows() == p_srt.cols() && p_ch.rows() == p_srt.rows(),
          "channel and sorter kernels must be square and of equal size");
  const Eigen::Index d = p_ch.rows();
  TotalProbabilities out;
  out.p_tot = p_srt * p_ch;
  out.survival.resize(d);
  for (Eigen::Index s = 0; s < d; ++s) {
    const double t = out.p_tot.col(s).sum();
    if (!(t > 0.0)) {
      throw Error(ErrorKind::DegenerateChannel, "no photon survives for input state " + std::to_string(s));
    }
    out.survival(s) = t;
    out.p_tot.col(s) /= t;
  }
  out.t_avg = out.survival.mean();
  return out;
}

double error_probability(const Eigen::MatrixXd& p_tot) {
  require(p_tot.rows() == p_tot.cols() && p_tot.rows() > 0, "P_Tot must be square");
  double off = 0.0;
  for (Eigen::Index s = 0; s < p_tot.cols(); ++s)
    for (Eigen::Index m = 0; m < p_tot.rows(); ++m)
      if (m != s) off += p_tot(m, s);
  return off / static_cast<double>(p_tot.rows());
}

DetectionReport detect(std::span<const int> labels, const Eigen::MatrixXd& p_ch_full,
                       std::span<const int> subspace, const SorterModel& sorter) {
  require(static_cast<Eigen::Index>(labels.size()) == p_ch_full.rows(), "label count does not match channel");
  require(sorter.n == static_cast<int>(subspace.size()), "sorter size must equal the subspace dimension");
  const auto d = static_cast<Eigen::Index>(subspace.size());
  std::vector<Eigen::Index> idx;
  for (int label : subspace) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw Error(ErrorKind::OutOfRange, "mode " + std::to_string(label) + " not in channel");
    idx.push_back(it - labels.begin());
  }
  Eigen::MatrixXd p(d, d);
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r) p(r, c) = p_ch_full(idx[r], idx[c]);
  auto total = total_probabilities(p, srt_matrix(sorter));
  DetectionReport report{{subspace.begin(), subspace.end()}, std::move(total.p_tot), std::move(total.survival),
                         total.t_avg, 0.0};
  report.p_e = error_probability(report.p_tot);
  return report;
}

DetectionReport detect(const AmplitudeMatrix& channel, std::span<const int> subspace, const SorterModel& sorter) {
  return detect(channel.labels(), channel.probabilities(), subspace, sorter);
}

std::vector<std::vector<int>> subsets(std::span<const int> candidates, int d) {
  const int n = static_cast<int>(candidates.size());
  require(d >= 1 && d <= n, "subspace dimension must lie in [1, candidate count]");
  std::vector<std::vector<int>> out;
  std::vector<int> pos(d);
  for (int i = 0; i < d; ++i) pos[i] = i;
  while (true) {
    std::vector<int> subset;
    for (int p : pos) subset.push_back(candidates[p]);
    out.push_back(std::move(subset));
    int i = d - 1;
    while (i >= 0 && pos[i] == n - d + i) --i;
    if (i < 0) break;
    ++pos[i];
    for (int k = i + 1; k < d; ++k) pos[k] = pos[k - 1] + 1;
  }
  return out;
}

SubspaceChoice optimize_subspace(std::span<const int> candidates, int d, Objective objective,
                                 const std::function<double(std::span<const int>)>& score) {
  SubspaceChoice best;
  bool have = false;
  for (const auto& subset : subsets(candidates, d)) {
    const double s = score(subset);
    ++best.evaluations;
    if (std::isnan(s)) continue;
    const bool better = objective == Objective::MinimizeErrorProbability ? s < best.score : s > best.score;
    if (!have || better) {
      best.subspace = subset;
      best.score = s;
      have = true;
    }
  }
  if (!have) throw Error(ErrorKind::DegenerateChannel, "no subspace produced a finite score");
  return best;
}

}  // namespace tmsat
