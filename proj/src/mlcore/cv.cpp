#include "ftd/mlcore/cv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "ftd/common.hpp"
#include "ftd/parallel.hpp"

namespace ftd::ml {

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& rows) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.session_ids.push_back(session_ids[rows[i]]);
    out.participant_ids.push_back(participant_ids[rows[i]]);
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::size_t>& columns) const {
  FeatureMatrix out;
  out.session_ids = session_ids;
  out.participant_ids = participant_ids;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.feature_names.push_back(feature_names[columns[j]]);
    out.values.col(static_cast<Eigen::Index>(j)) = values.col(static_cast<Eigen::Index>(columns[j]));
  }
  return out;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 engine(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(engine() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

namespace {

Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Vector take(const Vector& v, const std::vector<std::size_t>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(rows[i]));
  return out;
}

}  // namespace

ComponentSelection select_components(const Matrix& x, const Vector& y, std::size_t k_max,
                                     std::size_t folds, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (folds < 2) throw Error("select_components: need at least 2 folds");
  if (n < folds) {
    throw Error("select_components: " + std::to_string(n) + " rows cannot fill " +
                std::to_string(folds) + " folds");
  }
  if (k_max == 0) throw Error("select_components: k_max must be positive");

  const auto order = seeded_permutation(n, seed);
  std::vector<std::size_t> fold_of(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold_of[order[pos]] = pos % folds;

  std::vector<double> rmse_sum(k_max, 0.0);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? test : train).push_back(i);
    const Matrix xt = take_rows(x, train);
    const Vector yt = take(y, train);
    const Matrix xv = take_rows(x, test);
    const Vector yv = take(y, test);

    // Folds whose training part cannot support a model predict the mean.
    std::optional<PlsModel> model;
    try {
      const std::size_t bound =
          pls_component_bound(train.size(), StandardizationParams::fit(xt).retained.size());
      if (bound > 0) model = pls_fit(xt, yt, std::min(k_max, bound));
    } catch (const NumericError&) {
      model.reset();
    }
    const double fallback = yt.mean();
    for (std::size_t k = 1; k <= k_max; ++k) {
      const Vector pred =
          model ? model->predict(xv, k) : Vector::Constant(xv.rows(), fallback);
      const double mse = (pred - yv).squaredNorm() / static_cast<double>(test.size());
      rmse_sum[k - 1] += std::sqrt(mse);
    }
  }
  ComponentSelection sel;
  sel.mean_rmse.resize(k_max);
  for (std::size_t k = 0; k < k_max; ++k) sel.mean_rmse[k] = rmse_sum[k] / static_cast<double>(folds);
  sel.k_best = 1;
  for (std::size_t k = 2; k <= k_max; ++k) {
    if (sel.mean_rmse[k - 1] < sel.mean_rmse[sel.k_best - 1]) sel.k_best = k;
  }
  return sel;
}

PredictionResult lopo_cv(const FeatureMatrix& features, const std::map<std::string, double>& targets,
                         const std::string& target_name, const CvOptions& options) {
  const std::size_t n = features.rows();
  if (static_cast<std::size_t>(features.values.rows()) != n ||
      features.participant_ids.size() != n) {
    throw SchemaError("lopo_cv: inconsistent feature matrix");
  }
  std::vector<std::string> participants(features.participant_ids.begin(),
                                        features.participant_ids.end());
  std::sort(participants.begin(), participants.end());
  participants.erase(std::unique(participants.begin(), participants.end()), participants.end());
  if (participants.size() < 3) {
    throw Error("lopo_cv: need at least 3 participants, got " + std::to_string(participants.size()));
  }
  Vector y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    auto it = targets.find(features.participant_ids[i]);
    if (it == targets.end())
      throw Error("lopo_cv: no target for participant '" + features.participant_ids[i] + "'");
    y(static_cast<Eigen::Index>(i)) = it->second;
  }
  const Eigen::Index p = features.values.cols();
  std::vector<std::vector<PredictionRow>> fold_rows(participants.size());
  std::vector<FoldDiagnostics> diagnostics(participants.size());

  parallel_for(participants.size(), options.jobs, [&](std::size_t f) {
    const std::string& held = participants[f];
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (features.participant_ids[i] == held ? test : train).push_back(i);

    Matrix xt = take_rows(features.values, train);
    Matrix xv = take_rows(features.values, test);
    const Vector yt = take(y, train);

    FoldDiagnostics& diag = diagnostics[f];
    diag.held_out = held;
    diag.fold_index = f;
    diag.train_rows = train.size();
    diag.imputation.assign(static_cast<std::size_t>(p), 0.0);
    for (Eigen::Index c = 0; c < p; ++c) {
      double sum = 0.0;
      std::size_t defined = 0;
      for (Eigen::Index r = 0; r < xt.rows(); ++r) {
        if (std::isfinite(xt(r, c))) {
          sum += xt(r, c);
          ++defined;
        }
      }
      // A column undefined on every training row becomes constant and is
      // dropped by standardization.
      const double fill = defined > 0 ? sum / static_cast<double>(defined) : 0.0;
      diag.imputation[static_cast<std::size_t>(c)] = fill;
      for (Eigen::Index r = 0; r < xt.rows(); ++r)
        if (!std::isfinite(xt(r, c))) xt(r, c) = fill;
      for (Eigen::Index r = 0; r < xv.rows(); ++r)
        if (!std::isfinite(xv(r, c))) xv(r, c) = fill;
    }

    const auto params = StandardizationParams::fit(xt);
    diag.k_max = std::min<std::size_t>(options.max_components,
                                       pls_component_bound(train.size(), params.retained.size()));
    if (diag.k_max == 0) throw NumericError("fold '" + held + "': no usable feature column");
    const std::uint64_t fold_seed = splitmix64(options.seed ^ fnv1a64(held));
    const auto selection = select_components(xt, yt, diag.k_max, options.inner_folds, fold_seed);
    diag.k_selected = selection.k_best;
    diag.inner_rmse = selection.mean_rmse;

    const PlsModel model = pls_fit(xt, yt, diag.k_selected);
    diag.x_params = model.x_params;
    const Vector pred = model.predict(xv);
    for (std::size_t i = 0; i < test.size(); ++i) {
      fold_rows[f].push_back({held, features.session_ids[test[i]], y(static_cast<Eigen::Index>(test[i])),
                              pred(static_cast<Eigen::Index>(i)), f, diag.k_selected});
    }
  });

  PredictionResult result;
  result.target = target_name;
  result.folds = std::move(diagnostics);
  for (auto& rows : fold_rows)
    for (auto& r : rows) result.rows.push_back(std::move(r));
  std::vector<double> truth, pred;
  for (const auto& r : result.rows) {
    truth.push_back(r.ground_truth);
    pred.push_back(r.prediction);
  }
  result.report = truth.size() >= 3
                      ? spearman(truth, pred, options.alpha)
                      : CorrelationReport::make_degenerate(truth.size(), "fewer than 3 predictions",
                                                           options.alpha);
  return result;
}

}  // namespace ftd::ml
