#include "rankvar/tail_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "rankvar/error.hpp"

namespace rankvar {

HillEstimate hill_estimator(std::span<const double> data, std::size_t k) {
  if (k == 0) throw ArgumentError("hill_estimator needs k >= 1");
  if (data.size() < k + 1)
    throw ArgumentError("hill_estimator needs at least k+1 = " + std::to_string(k + 1) +
                        " observations (got " + std::to_string(data.size()) + ")");
  // The k+1 largest values, descending.
  std::vector<double> top(data.begin(), data.end());
  std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k + 1), top.end(),
                    std::greater<>());
  top.resize(k + 1);
  if (!(top[k] > 0.0)) throw DomainError("hill_estimator threshold X_(n-k) must be > 0");

  HillEstimate est;
  est.k = k;
  est.threshold = top[k];
  est.stability.reserve(k);
  double log_sum = 0.0;  // sum of log X_(n-i+1) for i <= k'
  for (std::size_t kp = 1; kp <= k; ++kp) {
    log_sum += std::log(top[kp - 1]);
    const double spacing = log_sum - static_cast<double>(kp) * std::log(top[kp]);
    est.stability.push_back(spacing > 0.0 ? static_cast<double>(kp) / spacing
                                          : std::numeric_limits<double>::quiet_NaN());
  }
  if (std::isnan(est.stability.back()))
    throw EstimateError("hill_estimator undefined: the top k values all equal the threshold");
  est.alpha_hat = est.stability.back();
  return est;
}

StretchedExpFit fit_stretched_exp(std::span<const double> data, double shift) {
  if (data.size() < 10) throw ArgumentError("fit_stretched_exp needs at least 10 points");
  if (!std::isfinite(shift)) throw ArgumentError("shift must be finite");
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  if (!(sorted.front() > shift))
    throw ArgumentError("fit_stretched_exp needs every value above shift");
  if (sorted.front() == sorted.back()) throw EstimateError("fit_stretched_exp: all values equal");

  const std::size_t n = sorted.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double survival = 1.0 - static_cast<double>(i + 1) / static_cast<double>(n + 1);
    xs[i] = std::log(sorted[i] - shift);
    ys[i] = std::log(-std::log(survival));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw EstimateError("fit_stretched_exp: degenerate design");

  StretchedExpFit fit;
  fit.gamma = sxy / sxx;
  const double intercept = my - fit.gamma * mx;
  fit.lambda = std::exp(intercept);
  fit.shift = shift;
  fit.points = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (intercept + fit.gamma * xs[i]);
    fit.residual_sum_squares += r * r;
  }
  if (!(fit.gamma > 0.0))
    throw EstimateError("fit_stretched_exp: fitted gamma is not positive");
  return fit;
}

std::vector<QQPoint> qq_points(std::span<const double> data, const TailModel& model) {
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::vector<QQPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].empirical = sorted[i];
    out[i].theoretical = model.quantile(static_cast<double>(i + 1) / static_cast<double>(n + 1));
  }
  return out;
}

double qq_deviation(std::span<const QQPoint> points) {
  double s = 0.0;
  for (const auto& q : points) s += (q.empirical - q.theoretical) * (q.empirical - q.theoretical);
  return s;
}

}  // namespace rankvar
