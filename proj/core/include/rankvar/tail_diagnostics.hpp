#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "rankvar/tail_models.hpp"

namespace rankvar {

struct HillEstimate {
  double alpha_hat = 0.0;
  std::size_t k = 0;
  double threshold = 0.0;  // X_(n-k), the (k+1)-th largest value
  // alpha_hat(k') for k' = 1..k, each with its own threshold X_(n-k'). Entries whose
  // log-spacing sum is zero are NaN.
  std::vector<double> stability;
};

// Hill estimator of the tail index from the k largest observations:
// 1/alpha_hat = (1/k) sum_{i=1..k} log(X_(n-i+1) / X_(n-k)).
// Throws ArgumentError (k = 0 or fewer than k+1 points), DomainError (threshold <= 0),
// EstimateError (the k top values all equal the threshold).
HillEstimate hill_estimator(std::span<const double> data, std::size_t k);

struct StretchedExpFit {
  double lambda = 0.0;
  double gamma = 0.0;
  double shift = 0.0;
  double residual_sum_squares = 0.0;
  std::size_t points = 0;
};

// Least-squares fit of log(-log S(x)) = log(lambda) + gamma log(x - shift) with the
// empirical survival S(x_(i)) = 1 - i/(n+1). Needs at least 10 points, all above shift.
StretchedExpFit fit_stretched_exp(std::span<const double> data, double shift);

struct QQPoint {
  double empirical = 0.0;
  double theoretical = 0.0;
};

// Sorted data against model quantiles at plotting positions i/(n+1).
std::vector<QQPoint> qq_points(std::span<const double> data, const TailModel& model);

// Sum of squared (empirical - theoretical) over the QQ pairs.
double qq_deviation(std::span<const QQPoint> points);

}  // namespace rankvar
