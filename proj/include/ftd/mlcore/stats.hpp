#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ftd::ml {

inline constexpr double kDefaultAlpha = 0.05;

/// Result of one no-correlation test. A degenerate report carries NaN rho
/// and p and is never significant.
struct CorrelationReport {
  double rho = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
  double p_value = std::numeric_limits<double>::quiet_NaN();
  bool significant = false;
  double alpha = kDefaultAlpha;
  bool degenerate = false;
  std::string note;

  static CorrelationReport make_degenerate(std::size_t n, std::string reason,
                                           double alpha = kDefaultAlpha);
};

/// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);

/// Spearman rho with a two-sided t-approximation p-value (n-2 dof).
/// Degenerate (not thrown) for constant input; throws Error when the
/// lengths differ or n < 3.
CorrelationReport spearman(std::span<const double> x, std::span<const double> y,
                           double alpha = kDefaultAlpha);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// Student t CDF with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Two-sided p-value for a Pearson-type coefficient over n pairs.
double correlation_p_value(double rho, std::size_t n);

double mean(std::span<const double> v);
/// Sample standard deviation (n-1). Zero for n < 2.
double sample_sd(std::span<const double> v);

}  // namespace ftd::ml
