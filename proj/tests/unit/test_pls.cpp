#include <random>

#include "doctest.h"
#include "ftd/common.hpp"
#include "ftd/mlcore/pls.hpp"

using namespace ftd;
using namespace ftd::ml;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p) {
  std::normal_distribution<double> g;
  Matrix x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = g(rng) * (1.0 + 0.5 * j) + j;
  return x;
}

// Least squares with an intercept, solved through the normal equations.
Vector ols_fitted(const Matrix& x, const Vector& y) {
  Matrix a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  const Vector beta = (a.transpose() * a).ldlt().solve(a.transpose() * y);
  return a * beta;
}

}  // namespace

TEST_SUITE("pls") {
  TEST_CASE("full-rank fit reproduces least squares") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix x = random_matrix(rng, 40, 5);
      Vector y(40);
      for (Eigen::Index i = 0; i < 40; ++i) y(i) = x.row(i).sum() * 0.3 - x(i, 2) + g(rng);
      const auto model = pls_fit(x, y, 5);
      CHECK(model.n_components == 5);
      CHECK((model.predict(x) - ols_fitted(x, y)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("single informative column is recovered with one component") {
    std::mt19937_64 rng(6);
    Matrix x = random_matrix(rng, 20, 1);
    Vector y = 3.0 * x.col(0).array() - 2.0;
    auto model = pls_fit(x, y, 1);
    CHECK((model.predict(x) - y).norm() < 1e-8);
  }

  TEST_CASE("duplicated columns fit without numerical failure") {
    std::mt19937_64 rng(7);
    Matrix base = random_matrix(rng, 15, 2);
    Matrix x(15, 3);
    x << base, base.col(0);
    Vector y = base.col(0) + 0.5 * base.col(1);
    auto model = pls_fit(x, y, 2);
    const Vector pred = model.predict(x);
    CHECK(pred.allFinite());
    CHECK((pred - y).norm() < 1e-8);
  }

  TEST_CASE("predicting at the training means returns the y mean") {
    std::mt19937_64 rng(8);
    const Matrix x = random_matrix(rng, 12, 4);
    Vector y = x.col(1) - x.col(3) + Vector::LinSpaced(12, 0, 1);
    auto model = pls_fit(x, y, 2);
    const Matrix center = x.colwise().mean();
    CHECK(model.predict(center)(0) == doctest::Approx(y.mean()).epsilon(1e-12));
  }

  TEST_CASE("schema mismatch") {
    std::mt19937_64 rng(9);
    const Matrix x = random_matrix(rng, 10, 2);
    Vector y = x.col(0) + Vector::LinSpaced(10, 0, 1);
    auto model = pls_fit(x, y, 1);
    CHECK_THROWS_AS(pls_predict(model, Matrix::Zero(1, 3)), SchemaError);
  }

  TEST_CASE("weights are unit norm and residuals shrink with k") {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> g;
    const Matrix x = random_matrix(rng, 30, 6);
    Vector y(30);
    for (Eigen::Index i = 0; i < 30; ++i) y(i) = x(i, 0) - 0.7 * x(i, 4) + g(rng);
    auto model = pls_fit(x, y, 6);
    for (Eigen::Index c = 0; c < model.weights.cols(); ++c)
      CHECK(std::fabs(model.weights.col(c).norm() - 1.0) < 1e-12);
    double previous = INFINITY;
    for (std::size_t k = 1; k <= model.n_components; ++k) {
      const double r = (model.predict(x, k) - y).norm();
      CHECK(r <= previous + 1e-10);
      previous = r;
    }
  }

  TEST_CASE("column order does not change predictions") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    const Matrix x = random_matrix(rng, 25, 5);
    Vector y(25);
    for (Eigen::Index i = 0; i < 25; ++i) y(i) = x(i, 1) + x(i, 3) + g(rng);
    const std::vector<int> perm = {3, 0, 4, 1, 2};
    Matrix xp(25, 5);
    for (int j = 0; j < 5; ++j) xp.col(j) = x.col(perm[j]);
    for (std::size_t k = 1; k <= 4; ++k) {
      const Vector a = pls_fit(x, y, k).predict(x);
      const Vector b = pls_fit(xp, y, k).predict(xp);
      CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("dropped constant columns are ignored at prediction time") {
    std::mt19937_64 rng(12);
    Matrix x = random_matrix(rng, 10, 3);
    x.col(1).setConstant(4.0);
    Vector y = x.col(0) + Vector::LinSpaced(10, 0, 1);
    auto model = pls_fit(x, y, 2);
    CHECK(model.x_params.dropped == std::vector<std::size_t>{1});
    Matrix probe = x.topRows(2);
    const Vector before = model.predict(probe);
    probe.col(1).setConstant(NAN);
    CHECK(model.predict(probe) == before);
  }

  TEST_CASE("error paths") {
    std::mt19937_64 rng(13);
    const Matrix x = random_matrix(rng, 6, 3);
    CHECK_THROWS_AS(pls_fit(x, Vector::Constant(6, 2.0), 1), NumericError);
    const Vector y = Vector::LinSpaced(6, 0, 5);
    CHECK_THROWS_AS(pls_fit(x, y, 0), Error);
    CHECK_THROWS_AS(pls_fit(x, y, 4), Error);
    CHECK_NOTHROW(pls_fit(x, y, 3));
    CHECK_THROWS_AS(pls_fit(x.topRows(2), y.head(2), 1), NumericError);
    CHECK_THROWS_AS(pls_fit(x, y.head(5), 1), SchemaError);
    CHECK(pls_component_bound(4, 10) == 3);
    CHECK(pls_component_bound(40, 5) == 5);
  }
}
