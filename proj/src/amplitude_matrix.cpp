#include "tmsat/amplitude_matrix.hpp"

#include <algorithm>
#include <string>

#include "tmsat/error.hpp"

namespace tmsat {

AmplitudeMatrix::AmplitudeMatrix(std::vector<int> labels, Eigen::MatrixXcd entries)
    : labels_(std::move(labels)), entries_(std::move(entries)) {
  require(entries_.rows() == entries_.cols(), "amplitude matrix must be square");
  require(static_cast<Eigen::Index>(labels_.size()) == entries_.rows(),
          "label count does not match matrix size");
}

AmplitudeMatrix AmplitudeMatrix::identity(std::vector<int> labels) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  return {std::move(labels), Eigen::MatrixXcd::Identity(n, n)};
}

Eigen::Index AmplitudeMatrix::index_of(int label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorKind::OutOfRange, "mode label " + std::to_string(label) + " not in matrix");
  return static_cast<Eigen::Index>(it - labels_.begin());
}

std::complex<double> AmplitudeMatrix::at(int out_label, int in_label) const {
  return entries_(index_of(out_label), index_of(in_label));
}

Eigen::MatrixXd AmplitudeMatrix::probabilities() const { return entries_.cwiseAbs2(); }

AmplitudeMatrix AmplitudeMatrix::restrict(std::span<const int> subset) const {
  std::vector<Eigen::Index> idx;
  idx.reserve(subset.size());
  for (int label : subset) idx.push_back(index_of(label));
  const auto d = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd sub(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) sub(r, c) = entries_(idx[r], idx[c]);
  return {std::vector<int>(subset.begin(), subset.end()), std::move(sub)};
}

}  // namespace tmsat
