#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ftd/mlcore/linalg.hpp"
#include "ftd/mlcore/pls.hpp"
#include "ftd/mlcore/stats.hpp"

namespace ftd::ml {

inline constexpr std::uint64_t kDefaultSeed = 20230901;

/// Session-by-feature matrix. Undefined feature values are NaN and get
/// imputed with training-fold means inside lopo_cv.
struct FeatureMatrix {
  std::vector<std::string> session_ids;
  std::vector<std::string> participant_ids;
  std::vector<std::string> feature_names;
  Matrix values;

  std::size_t rows() const { return session_ids.size(); }
  FeatureMatrix select_rows(const std::vector<std::size_t>& rows) const;
  FeatureMatrix select_columns(const std::vector<std::size_t>& columns) const;
};

/// Fisher-Yates over [0, n) driven by mt19937_64 raw output, so the order is
/// identical on every conforming standard library.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

struct ComponentSelection {
  std::size_t k_best = 1;
  std::vector<double> mean_rmse;  ///< index k-1
};

/// Picks k in 1..k_max minimizing mean RMSE over `folds` seeded folds; ties
/// go to the smaller k. Throws Error when n < folds or k_max == 0.
ComponentSelection select_components(const Matrix& x, const Vector& y, std::size_t k_max,
                                     std::size_t folds, std::uint64_t seed);

struct CvOptions {
  std::uint64_t seed = kDefaultSeed;
  std::size_t max_components = 10;
  std::size_t inner_folds = 5;
  std::size_t jobs = 1;
  double alpha = kDefaultAlpha;
};

struct FoldDiagnostics {
  std::string held_out;
  std::size_t fold_index = 0;
  std::size_t train_rows = 0;
  std::vector<double> imputation;  ///< training-fold column means
  StandardizationParams x_params;
  std::size_t k_max = 0;
  std::size_t k_selected = 0;
  std::vector<double> inner_rmse;
};

struct PredictionRow {
  std::string participant_id;
  std::string session_id;
  double ground_truth = 0.0;
  double prediction = 0.0;
  std::size_t fold_index = 0;
  std::size_t k_selected = 0;
};

struct PredictionResult {
  std::string target;
  std::vector<PredictionRow> rows;
  std::vector<FoldDiagnostics> folds;
  /// Pooled Spearman over all held-out predictions.
  CorrelationReport report;
};

/// Leave-one-participant-out CV with inner component selection. Every
/// statistic of a fold (imputation means, standardization, k) comes from
/// that fold's training rows only. Folds follow participant id order.
PredictionResult lopo_cv(const FeatureMatrix& features,
                         const std::map<std::string, double>& targets,
                         const std::string& target_name, const CvOptions& options = {});

}  // namespace ftd::ml
