#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace ftd::ml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Column centering/scaling fitted on training rows. Columns whose training
/// SD is zero (or not finite) are dropped and listed in `dropped`.
struct StandardizationParams {
  std::size_t input_columns = 0;
  std::vector<std::size_t> retained;
  std::vector<std::size_t> dropped;
  Vector mean;  ///< per retained column
  Vector sd;    ///< per retained column, sample SD (n-1), always > 0

  static StandardizationParams fit(const Matrix& x);
  /// Returns the standardized retained columns of `x`.
  Matrix apply(const Matrix& x) const;

  friend bool operator==(const StandardizationParams& a, const StandardizationParams& b) {
    return a.input_columns == b.input_columns && a.retained == b.retained &&
           a.dropped == b.dropped && a.mean.size() == b.mean.size() && a.mean == b.mean &&
           a.sd.size() == b.sd.size() && a.sd == b.sd;
  }
};

}  // namespace ftd::ml
