#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ftd/mlcore/linalg.hpp"

namespace ftd::ml {

/// Single-response PLS fitted by NIPALS on standardized data.
struct PlsModel {
  StandardizationParams x_params;
  double y_mean = 0.0;
  double y_sd = 1.0;
  std::size_t requested_components = 0;
  /// Components actually extracted; smaller than requested when the
  /// cross-covariance vanished early.
  std::size_t n_components = 0;
  Matrix weights;   ///< W, retained features x components, unit-norm columns
  Matrix loadings;  ///< P
  Vector y_loadings;  ///< q
  /// Original-space coefficients and intercept of the k-component model,
  /// index k-1.
  std::vector<Vector> coefficients;
  std::vector<double> intercepts;

  /// Predicts with min(k, n_components) components (all when k is empty).
  Vector predict(const Matrix& x, std::optional<std::size_t> k = std::nullopt) const;
};

struct PlsOptions {
  /// Stop when ||X'y|| falls below this (scaled by the initial norm when
  /// that exceeds 1).
  double cross_covariance_tolerance = 1e-12;
};

/// Largest admissible component count: min(n - 1, retained features).
std::size_t pls_component_bound(std::size_t n_rows, std::size_t retained_features);

/// Throws NumericError for constant y or n < 3; Error when k is 0 or above
/// pls_component_bound.
PlsModel pls_fit(const Matrix& x, const Vector& y, std::size_t k, const PlsOptions& options = {});

/// Same as model.predict; throws SchemaError on a column count mismatch.
Vector pls_predict(const PlsModel& model, const Matrix& x,
                   std::optional<std::size_t> k = std::nullopt);

}  // namespace ftd::ml
