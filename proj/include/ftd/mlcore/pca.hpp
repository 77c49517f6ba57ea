#pragma once

#include "ftd/mlcore/linalg.hpp"

namespace ftd::ml {

struct PcaOptions {
  double tolerance = 1e-10;
  int max_iterations = 1000;
};

struct PrincipalComponent {
  Vector loading;  ///< unit norm
  double eigenvalue = 0.0;
  int iterations = 0;
};

/// Leading eigenvector of the column covariance of `x` by power iteration.
/// Throws NumericError on zero total variance, fewer than 2 rows or
/// columns, or non-convergence.
PrincipalComponent pca_first_component(const Matrix& x, const PcaOptions& options = {});

}  // namespace ftd::ml
