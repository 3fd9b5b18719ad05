#include "rankvar/tail_models.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

namespace rankvar {
namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double value, const char* what) {
  if (!(std::isfinite(value) && value > 0.0)) {
    std::ostringstream os;
    os << "tail model parameter " << what << " must be finite and > 0 (got " << value << ")";
    throw DomainError(os.str());
  }
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw DomainError(std::string("tail model parameter ") + what + " must be finite");
  }
}

void require_open_unit(double u, const char* fn) {
  if (!(u > 0.0 && u < 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << fn << ": probability must lie in (0,1) (got " << u << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

TailModel::TailModel(Family family) : family_(family) {
  std::visit(Overloaded{
                 [](const Exponential& f) { require_positive(f.rate, "rate"); },
                 [](const Pareto& f) { require_positive(f.alpha, "alpha"); },
                 [](const BoundedPower& f) { require_positive(f.alpha, "alpha"); },
                 [](const Normal& f) {
                   require_finite(f.mu, "mu");
                   require_positive(f.sigma, "sigma");
                 },
                 [](const StretchedExp& f) {
                   require_positive(f.lambda, "lambda");
                   require_positive(f.gamma, "gamma");
                   require_finite(f.shift, "shift");
                 },
             },
             family_);
}

double TailModel::cdf(double x) const noexcept {
  return std::visit(
      Overloaded{
          [x](const Exponential& f) { return x <= 0.0 ? 0.0 : -std::expm1(-f.rate * x); },
          [x](const Pareto& f) { return x <= 1.0 ? 0.0 : -std::expm1(-f.alpha * std::log(x)); },
          [x](const BoundedPower& f) {
            if (x <= 0.0) return 0.0;
            if (x >= 1.0) return 1.0;
            return std::pow(x, f.alpha);
          },
          [x](const Normal& f) { return 0.5 * std::erfc(-(x - f.mu) / (f.sigma * kSqrt2)); },
          [x](const StretchedExp& f) {
            return x <= f.shift ? 0.0 : -std::expm1(-f.lambda * std::pow(x - f.shift, f.gamma));
          },
      },
      family_);
}

double TailModel::survival(double x) const noexcept {
  return std::visit(
      Overloaded{
          [x](const Exponential& f) { return x <= 0.0 ? 1.0 : std::exp(-f.rate * x); },
          [x](const Pareto& f) { return x <= 1.0 ? 1.0 : std::pow(x, -f.alpha); },
          [this, x](const BoundedPower&) { return 1.0 - cdf(x); },
          [x](const Normal& f) { return 0.5 * std::erfc((x - f.mu) / (f.sigma * kSqrt2)); },
          [x](const StretchedExp& f) {
            return x <= f.shift ? 1.0 : std::exp(-f.lambda * std::pow(x - f.shift, f.gamma));
          },
      },
      family_);
}

double TailModel::quantile(double u) const {
  require_open_unit(u, "quantile");
  return std::visit(
      Overloaded{
          [u](const Exponential& f) { return -std::log1p(-u) / f.rate; },
          [u](const Pareto& f) { return std::exp(-std::log1p(-u) / f.alpha); },
          [u](const BoundedPower& f) { return std::pow(u, 1.0 / f.alpha); },
          [u](const Normal& f) {
            return f.mu - f.sigma * kSqrt2 * boost::math::erfc_inv(2.0 * u);
          },
          [u](const StretchedExp& f) {
            return f.shift + std::pow(-std::log1p(-u) / f.lambda, 1.0 / f.gamma);
          },
      },
      family_);
}

double TailModel::upper_quantile(double s) const {
  require_open_unit(s, "upper_quantile");
  return std::visit(
      Overloaded{
          [s](const Exponential& f) { return -std::log(s) / f.rate; },
          [s](const Pareto& f) { return std::pow(s, -1.0 / f.alpha); },
          [s](const BoundedPower& f) { return std::exp(std::log1p(-s) / f.alpha); },
          [s](const Normal& f) { return f.mu + f.sigma * kSqrt2 * boost::math::erfc_inv(2.0 * s); },
          [s](const StretchedExp& f) {
            return f.shift + std::pow(-std::log(s) / f.lambda, 1.0 / f.gamma);
          },
      },
      family_);
}

std::string TailModel::name() const {
  return std::visit(Overloaded{
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const Pareto&) { return std::string("pareto"); },
                        [](const BoundedPower&) { return std::string("bounded"); },
                        [](const Normal&) { return std::string("normal"); },
                        [](const StretchedExp&) { return std::string("stretchedexp"); },
                    },
                    family_);
}

std::string TailModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&os](const Exponential& f) { os << "exponential(rate=" << f.rate << ")"; },
                 [&os](const Pareto& f) { os << "pareto(alpha=" << f.alpha << ")"; },
                 [&os](const BoundedPower& f) { os << "bounded(alpha=" << f.alpha << ")"; },
                 [&os](const Normal& f) {
                   os << "normal(mu=" << f.mu << ",sigma=" << f.sigma << ")";
                 },
                 [&os](const StretchedExp& f) {
                   os << "stretchedexp(lambda=" << f.lambda << ",gamma=" << f.gamma
                      << ",shift=" << f.shift << ")";
                 },
             },
             family_);
  return os.str();
}

}  // namespace rankvar
