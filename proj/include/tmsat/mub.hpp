#pragma once

#include <Eigen/Dense>
#include <vector>

namespace tmsat {

/// Complete set of d + 1 mutually unbiased bases. Each matrix holds one basis
/// with its states as columns in the standard basis; bases[0] is identity.
struct MubSet {
  int d = 0;
  std::vector<Eigen::MatrixXcd> bases;
};

// True for the dimensions build_mubs accepts.
bool mub_supported(int d) noexcept;

/// d in {2,3,4,5,7,8,9}. Throws UnsupportedDimension for d = 6 and
/// OutOfRange outside [2, 9].
MubSet build_mubs(int d);

}  // namespace tmsat
