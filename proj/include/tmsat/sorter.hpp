#pragma once

#include <Eigen/Dense>

namespace tmsat {

/// Chain of N quantum pulse gates with selection factor eta0 and error
/// factor eta1. Detector and state indices are 1-based.
struct SorterModel {
  int n = 1;
  double eta0 = 0.9;
  double eta1 = 0.0;

  void validate() const;
};

// Ideal sorter: unit efficiency, no cross-conversion.
SorterModel perfect_sorter(int n);

double srt_probability(int k, int j, const SorterModel& model);

// Entry (k-1, j-1) = P(k|j); column j is the detector distribution for input j.
Eigen::MatrixXd srt_matrix(const SorterModel& model);

double separability(const SorterModel& model);

}  // namespace tmsat
