#include "ftd/mlcore/pca.hpp"

#include <cmath>
#include <limits>

#include "ftd/common.hpp"

namespace ftd::ml {

StandardizationParams StandardizationParams::fit(const Matrix& x) {
  StandardizationParams p;
  p.input_columns = static_cast<std::size_t>(x.cols());
  const auto n = x.rows();
  std::vector<double> means, sds;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double m = n > 0 ? x.col(c).mean() : 0.0;
    double sd = 0.0;
    if (n > 1) sd = std::sqrt((x.col(c).array() - m).square().sum() / static_cast<double>(n - 1));
    // Relative guard so columns constant up to rounding also count as constant.
    const bool usable = std::isfinite(m) && std::isfinite(sd) &&
                        sd > 1e-12 * std::max(1.0, std::fabs(m));
    if (usable) {
      p.retained.push_back(static_cast<std::size_t>(c));
      means.push_back(m);
      sds.push_back(sd);
    } else {
      p.dropped.push_back(static_cast<std::size_t>(c));
    }
  }
  p.mean = Eigen::Map<Vector>(means.data(), static_cast<Eigen::Index>(means.size()));
  p.sd = Eigen::Map<Vector>(sds.data(), static_cast<Eigen::Index>(sds.size()));
  return p;
}

Matrix StandardizationParams::apply(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != input_columns) {
    throw SchemaError("expected " + std::to_string(input_columns) + " columns, got " +
                      std::to_string(x.cols()));
  }
  Matrix out(x.rows(), static_cast<Eigen::Index>(retained.size()));
  for (std::size_t j = 0; j < retained.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out.col(jj) = (x.col(static_cast<Eigen::Index>(retained[j])).array() - mean(jj)) / sd(jj);
  }
  return out;
}

PrincipalComponent pca_first_component(const Matrix& x, const PcaOptions& options) {
  if (x.rows() < 2 || x.cols() < 2) throw NumericError("PCA needs at least 2 rows and 2 columns");
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  if (!(cov.trace() > 0.0)) throw NumericError("PCA: zero total variance");

  // Start from the covariance columns sign-aligned with the largest one; this
  // is never orthogonal to the leading direction of a nonzero PSD matrix.
  Eigen::Index anchor = 0;
  cov.colwise().norm().maxCoeff(&anchor);
  Vector v = Vector::Zero(cov.rows());
  for (Eigen::Index j = 0; j < cov.cols(); ++j) {
    const double s = cov.col(j).dot(cov.col(anchor)) >= 0.0 ? 1.0 : -1.0;
    v += s * cov.col(j);
  }
  if (v.norm() == 0.0) v = cov.col(anchor);
  v.normalize();

  for (int it = 1; it <= options.max_iterations; ++it) {
    Vector next = cov * v;
    const double norm = next.norm();
    if (norm == 0.0) throw NumericError("PCA: power iteration collapsed to zero");
    next /= norm;
    const double delta = (next - v).norm();
    v = std::move(next);
    if (delta < options.tolerance) {
      return {v, v.dot(cov * v), it};
    }
  }
  throw NumericError("PCA power iteration did not converge within " +
                     std::to_string(options.max_iterations) + " iterations");
}

}  // namespace ftd::ml
