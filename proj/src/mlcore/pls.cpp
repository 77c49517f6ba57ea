#include "ftd/mlcore/pls.hpp"

#include <algorithm>
#include <cmath>

#include "ftd/common.hpp"

namespace ftd::ml {

std::size_t pls_component_bound(std::size_t n_rows, std::size_t retained_features) {
  if (n_rows == 0) return 0;
  return std::min(n_rows - 1, retained_features);
}

PlsModel pls_fit(const Matrix& x, const Vector& y, std::size_t k, const PlsOptions& options) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (static_cast<std::size_t>(y.size()) != n) throw SchemaError("pls_fit: X and y row counts differ");
  if (n < 3) throw NumericError("pls_fit: need at least 3 rows");
  if (k == 0) throw Error("pls_fit: need at least one component");

  PlsModel model;
  model.x_params = StandardizationParams::fit(x);
  const std::size_t p = model.x_params.retained.size();
  const std::size_t bound = pls_component_bound(n, p);
  if (k > bound) {
    throw Error("pls_fit: " + std::to_string(k) + " components exceed the bound " +
                std::to_string(bound) + " (n=" + std::to_string(n) +
                ", retained features=" + std::to_string(p) + ")");
  }
  model.y_mean = y.mean();
  model.y_sd = std::sqrt((y.array() - model.y_mean).square().sum() / static_cast<double>(n - 1));
  if (!(model.y_sd > 1e-12 * std::max(1.0, std::fabs(model.y_mean))))
    throw NumericError("pls_fit: constant target in training data");
  model.requested_components = k;

  Matrix xs = model.x_params.apply(x);
  Vector ys = (y.array() - model.y_mean) / model.y_sd;

  model.weights.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k));
  model.loadings.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k));
  model.y_loadings.resize(static_cast<Eigen::Index>(k));

  double threshold = options.cross_covariance_tolerance;
  std::size_t a = 0;
  for (; a < k; ++a) {
    Vector w = xs.transpose() * ys;
    const double wn = w.norm();
    if (a == 0) threshold *= std::max(1.0, wn);
    if (wn < threshold) break;
    w /= wn;
    const Vector t = xs * w;
    const double tt = t.squaredNorm();
    if (!(tt > 0.0)) break;
    const Vector pa = xs.transpose() * t / tt;
    const double qa = ys.dot(t) / tt;
    xs -= t * pa.transpose();
    ys -= qa * t;
    const auto col = static_cast<Eigen::Index>(a);
    model.weights.col(col) = w;
    model.loadings.col(col) = pa;
    model.y_loadings(col) = qa;
  }
  model.n_components = a;
  if (a == 0) throw NumericError("pls_fit: features carry no covariance with the target");
  model.weights.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(a));
  model.loadings.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(a));
  model.y_loadings.conservativeResize(static_cast<Eigen::Index>(a));

  for (std::size_t c = 1; c <= a; ++c) {
    const auto cc = static_cast<Eigen::Index>(c);
    const Matrix wk = model.weights.leftCols(cc);
    const Matrix pk = model.loadings.leftCols(cc);
    // P'W is upper triangular with unit diagonal for NIPALS.
    const Matrix ptw = pk.transpose() * wk;
    const Vector b_std = wk * ptw.triangularView<Eigen::Upper>().solve(model.y_loadings.head(cc));
    Vector beta = Vector::Zero(static_cast<Eigen::Index>(model.x_params.input_columns));
    double intercept = model.y_mean;
    for (std::size_t j = 0; j < p; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double coef = b_std(jj) * model.y_sd / model.x_params.sd(jj);
      beta(static_cast<Eigen::Index>(model.x_params.retained[j])) = coef;
      intercept -= coef * model.x_params.mean(jj);
    }
    model.coefficients.push_back(std::move(beta));
    model.intercepts.push_back(intercept);
  }
  return model;
}

Vector PlsModel::predict(const Matrix& x, std::optional<std::size_t> k) const {
  if (static_cast<std::size_t>(x.cols()) != x_params.input_columns) {
    throw SchemaError("model trained on " + std::to_string(x_params.input_columns) +
                      " features, got " + std::to_string(x.cols()));
  }
  if (n_components == 0) throw Error("predict on an unfitted model");
  std::size_t use = std::min(k.value_or(n_components), n_components);
  if (use == 0) use = 1;
  // Values in dropped columns are ignored, even when not finite.
  const Vector& beta = coefficients[use - 1];
  Vector out = Vector::Constant(x.rows(), intercepts[use - 1]);
  for (std::size_t j : x_params.retained) {
    const auto jj = static_cast<Eigen::Index>(j);
    out += beta(jj) * x.col(jj);
  }
  return out;
}

Vector pls_predict(const PlsModel& model, const Matrix& x, std::optional<std::size_t> k) {
  return model.predict(x, k);
}

}  // namespace ftd::ml
