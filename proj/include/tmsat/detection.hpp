#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "tmsat/amplitude_matrix.hpp"
#include "tmsat/sorter.hpp"

namespace tmsat {

struct TotalProbabilities {
  Eigen::MatrixXd p_tot;     // column-normalized P_Tot(m|s)
  Eigen::VectorXd survival;  // T_s
  double t_avg = 0.0;        // mean of T_s
};

/// Composes channel and sorter kernels; p_ch(r, s) and p_srt(m, r) are
/// conditional probabilities with the condition along columns.
TotalProbabilities total_probabilities(const Eigen::MatrixXd& p_ch, const Eigen::MatrixXd& p_srt);

/// (1/d) * sum of the off-diagonal entries.
double error_probability(const Eigen::MatrixXd& p_tot);

struct DetectionReport {
  std::vector<int> subspace;
  Eigen::MatrixXd p_tot;
  Eigen::VectorXd survival;
  double t_avg = 0.0;
  double p_e = 0.0;
};

/// Detection statistics for `subspace` given full-basis channel
/// probabilities (labels index rows/columns) and a sorter of size d.
DetectionReport detect(std::span<const int> labels, const Eigen::MatrixXd& p_ch_full,
                       std::span<const int> subspace, const SorterModel& sorter);

DetectionReport detect(const AmplitudeMatrix& channel, std::span<const int> subspace,
                       const SorterModel& sorter);

enum class Objective { MinimizeErrorProbability, MaximizeKeyRate };

struct SubspaceChoice {
  std::vector<int> subspace;
  double score = 0.0;
  std::size_t evaluations = 0;
};

/// Exhaustive search over all size-d subsets of `candidates` (taken in the
/// given order). Ties go to the lexicographically first subset.
SubspaceChoice optimize_subspace(std::span<const int> candidates, int d, Objective objective,
                                 const std::function<double(std::span<const int>)>& score);

// All size-d subsets in lexicographic order of positions.
std::vector<std::vector<int>> subsets(std::span<const int> candidates, int d);

}  // namespace tmsat
