#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace tmsat {

/// Complex mode-scattering amplitudes. Entry (r, c) is the amplitude of
/// output mode labels()[r] given input mode labels()[c]; rows and columns
/// share one label set.
class AmplitudeMatrix {
 public:
  AmplitudeMatrix() = default;
  AmplitudeMatrix(std::vector<int> labels, Eigen::MatrixXcd entries);

  static AmplitudeMatrix identity(std::vector<int> labels);

  const std::vector<int>& labels() const noexcept { return labels_; }
  const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
  Eigen::Index size() const noexcept { return entries_.rows(); }

  // Position of `label` in labels(); throws OutOfRange if absent.
  Eigen::Index index_of(int label) const;

  std::complex<double> at(int out_label, int in_label) const;

  // Squared moduli.
  Eigen::MatrixXd probabilities() const;

  // Sub-matrix on `subset` (ordered as given).
  AmplitudeMatrix restrict(std::span<const int> subset) const;

 private:
  std::vector<int> labels_;
  Eigen::MatrixXcd entries_;
};

}  // namespace tmsat
