#include "rankvar/rates.hpp"

#include <cmath>
#include <sstream>

#include "rankvar/error.hpp"

namespace rankvar {
namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw DomainError("alpha must be finite and > 0");
}

void require_at_least(double v, double lo, const char* what) {
  if (!(v >= lo) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be >= " << lo << " (got " << v << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

std::string_view to_string(TailFamily f) noexcept {
  switch (f) {
    case TailFamily::exponential: return "exponential";
    case TailFamily::polynomial: return "polynomial";
    case TailFamily::bounded: return "bounded";
  }
  return "?";
}

TailFamily parse_tail_family(std::string_view text) {
  if (text == "exponential") return TailFamily::exponential;
  if (text == "polynomial") return TailFamily::polynomial;
  if (text == "bounded") return TailFamily::bounded;
  throw ArgumentError("unknown family '" + std::string(text) +
                      "' (expected exponential|polynomial|bounded)");
}

double nu_exp(double n, double alpha) {
  require_at_least(n, 2.0, "n");
  require_alpha(alpha);
  return std::pow(n, 0.25) * std::pow(std::log(n), (1.0 / alpha - 1.0) / 2.0);
}

double nu_pol(double n, double p, double alpha) {
  require_at_least(n, 1.0, "n");
  require_at_least(p, 1.0, "p");
  require_alpha(alpha);
  // Work in logs: n^{alpha/2} overflows for large alpha.
  return std::exp((0.5 * alpha * std::log(n) + std::log(p)) / (2.0 * alpha + 1.0));
}

double bounded_threshold(double n, double p, double alpha) {
  require_at_least(n, 1.0, "n");
  require_at_least(p, 1.0, "p");
  require_alpha(alpha);
  if (!(alpha > 0.5)) throw DomainError("bounded threshold requires alpha > 1/2");
  return std::exp((0.5 * alpha * std::log(n) - std::log(p)) / (2.0 * alpha - 1.0));
}

RegimeReport classify_bounded(double n, double p, double alpha, std::optional<double> j0) {
  require_alpha(alpha);
  require_at_least(n, 1.0, "n");
  require_at_least(p, 1.0, "p");
  if (j0) require_at_least(*j0, 1.0, "j0");

  RegimeReport r;
  r.n = n;
  r.p = p;
  r.alpha = alpha;
  r.j0 = j0;
  r.family = TailFamily::bounded;
  r.ratio = std::exp(2.0 * std::log(p) - alpha * std::log(n));
  r.degenerate = r.ratio >= 1.0;

  std::ostringstream notes;
  if (alpha < 0.5) {
    r.regime = "alpha<1/2";
    r.nu = p;
    notes << "all ranks attainable when p^2/n^alpha is small";
  } else if (alpha == 0.5) {
    r.regime = "alpha=1/2";
    r.nu = p;
    if (j0) {
      r.log_term = std::pow(std::log(*j0), 2.0 * alpha) * r.ratio;
      notes << "depth j0 governed by (log j0)^{2 alpha} p^2/n^alpha = " << *r.log_term;
    } else {
      notes << "supply j0 to evaluate (log j0)^{2 alpha} p^2/n^alpha";
    }
  } else {
    r.regime = "alpha>1/2";
    r.bounded_threshold = bounded_threshold(n, p, alpha);
    r.nu = *r.bounded_threshold;
    notes << "correct depth must be small relative to (n^{alpha/2}/p)^{1/(2 alpha-1)} = "
          << *r.bounded_threshold;
  }
  if (r.degenerate) {
    r.regime += ",degenerate";
    notes << "; p^2/n^alpha = " << r.ratio << " >= 1: even the top rank is expected to fail";
  }
  r.notes = notes.str();
  return r;
}

RegimeReport evaluate_regime(TailFamily family, double n, double p, double alpha,
                             std::optional<double> j0) {
  if (family == TailFamily::bounded) return classify_bounded(n, p, alpha, j0);
  require_alpha(alpha);
  RegimeReport r;
  r.n = n;
  r.p = p;
  r.alpha = alpha;
  r.j0 = j0;
  r.family = family;
  require_at_least(p, 1.0, "p");
  if (family == TailFamily::exponential) {
    r.nu = nu_exp(n, alpha);
    r.regime = "exponential";
    r.notes = "critical depth scale n^{1/4}(log n)^{(1/alpha-1)/2}, independent of p";
  } else {
    r.nu = nu_pol(n, p, alpha);
    r.regime = "polynomial";
    r.notes = "critical depth scale (n^{alpha/2} p)^{1/(2 alpha+1)}";
  }
  r.ratio = std::exp(2.0 * std::log(p) - alpha * std::log(n));
  if (j0) {
    std::ostringstream os;
    os << "; j0/nu = " << *j0 / r.nu;
    r.notes += os.str();
  }
  return r;
}

}  // namespace rankvar
