#include "tmsat/sorter.hpp"

#include <cmath>
#include <string>

#include "tmsat/error.hpp"

namespace tmsat {

void SorterModel::validate() const {
  require(n >= 1, "sorter needs at least one gate");
  require(eta0 >= 0.0 && eta0 <= 1.0, "eta0 must lie in [0, 1]");
  require(eta1 >= 0.0 && eta1 <= eta0, "eta1 must lie in [0, eta0]");
}

SorterModel perfect_sorter(int n) { return {n, 1.0, 0.0}; }

double srt_probability(int k, int j, const SorterModel& model) {
  model.validate();
  require(k >= 1 && k <= model.n, "detector index " + std::to_string(k) + " out of range");
  require(j >= 1 && j <= model.n, "state index " + std::to_string(j) + " out of range");
  const double pass = 1.0 - model.eta1;
  if (k > j) return std::pow(pass, k - 2) * (1.0 - model.eta0) * model.eta1;
  if (k == j) return std::pow(pass, k - 1) * model.eta0;
  return std::pow(pass, k - 1) * model.eta1;
}

Eigen::MatrixXd srt_matrix(const SorterModel& model) {
  model.validate();
  Eigen::MatrixXd m(model.n, model.n);
  for (int j = 1; j <= model.n; ++j)
    for (int k = 1; k <= model.n; ++k) m(k - 1, j - 1) = srt_probability(k, j, model);
  return m;
}

double separability(const SorterModel& model) {
  model.validate();
  const double total = model.eta0 + (model.n - 1) * model.eta1;
  require(total > 0.0, "separability undefined for a sorter with zero efficiency");
  return model.eta0 / total;
}

}  // namespace tmsat
