#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "rankvar/error.hpp"
#include "rankvar/random.hpp"

namespace rankvar {

// Parametric families for the latent item attributes.
struct Exponential {
  double rate = 1.0;
  friend bool operator==(const Exponential&, const Exponential&) = default;
};
// F(x) = 1 - x^-alpha on [1, inf).
struct Pareto {
  double alpha = 1.0;
  friend bool operator==(const Pareto&, const Pareto&) = default;
};
// F(x) = x^alpha on [0, 1].
struct BoundedPower {
  double alpha = 1.0;
  friend bool operator==(const BoundedPower&, const BoundedPower&) = default;
};
struct Normal {
  double mu = 0.0;
  double sigma = 1.0;
  friend bool operator==(const Normal&, const Normal&) = default;
};
// Survival exp{-lambda (x - shift)^gamma} on [shift, inf).
struct StretchedExp {
  double lambda = 1.0;
  double gamma = 1.0;
  double shift = 0.0;
  friend bool operator==(const StretchedExp&, const StretchedExp&) = default;
};

class TailModel {
 public:
  using Family = std::variant<Exponential, Pareto, BoundedPower, Normal, StretchedExp>;

  // Throws DomainError unless every scale/shape parameter is finite and positive.
  explicit TailModel(Family family);
  TailModel(Exponential f) : TailModel(Family(f)) {}
  TailModel(Pareto f) : TailModel(Family(f)) {}
  TailModel(BoundedPower f) : TailModel(Family(f)) {}
  TailModel(Normal f) : TailModel(Family(f)) {}
  TailModel(StretchedExp f) : TailModel(Family(f)) {}

  const Family& family() const noexcept { return family_; }

  double cdf(double x) const noexcept;
  double survival(double x) const noexcept;

  // F^-1(u). Throws DomainError unless 0 < u < 1.
  double quantile(double u) const;
  // F^-1(1 - s), evaluated without forming 1 - s so the far upper tail keeps precision.
  double upper_quantile(double s) const;

  // Short family name: exponential, pareto, bounded, normal, stretchedexp.
  std::string name() const;
  // Human-readable form with parameters, e.g. "pareto(alpha=4)".
  std::string describe() const;

  friend bool operator==(const TailModel&, const TailModel&) = default;

 private:
  Family family_;
};

enum class TailSide { lower, upper };

// p independent draws by inverse-CDF transform of the stream's uniforms.
template <UnitStream S>
std::vector<double> sample_iid(const TailModel& model, std::size_t p, S& stream) {
  std::vector<double> out;
  out.reserve(p);
  for (std::size_t i = 0; i < p; ++i) out.push_back(model.quantile(stream.uniform()));
  return out;
}

// The k most extreme order statistics of a virtual i.i.d. sample of size p, via the
// Renyi representation of uniform order statistics: with Z_i standard exponential,
// V_j = sum_{i<=j} Z_i / (p - i + 1) and U_(j) = 1 - exp(-V_j). Cost is O(k), not O(p).
// The upper side reflects the same construction. Output is ascending.
template <UnitStream S>
std::vector<double> sample_extreme_order_stats(const TailModel& model, std::size_t p,
                                               std::size_t k, TailSide side, S& stream) {
  if (k > p) {
    throw ArgumentError("sample_extreme_order_stats: k=" + std::to_string(k) +
                        " exceeds p=" + std::to_string(p));
  }
  std::vector<double> out;
  out.reserve(k);
  double v = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    v += standard_exponential(stream) / static_cast<double>(p - i + 1);
    // -expm1(-v) = 1 - exp(-v): the lower-tail uniform order statistic, or the upper-tail
    // survival probability after reflection.
    const double u = std::min(-std::expm1(-v), 0x1.fffffffffffffp-1);
    out.push_back(side == TailSide::lower ? model.quantile(u) : model.upper_quantile(u));
  }
  if (side == TailSide::upper) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace rankvar
