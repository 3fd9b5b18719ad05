#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace rankvar {

enum class TailFamily { exponential, polynomial, bounded };

std::string_view to_string(TailFamily f) noexcept;
TailFamily parse_tail_family(std::string_view text);

// Critical depth rate for exponentially light tails: n^{1/4} (log n)^{(1/alpha - 1)/2}.
// Throws DomainError for n < 2 or alpha <= 0.
double nu_exp(double n, double alpha);

// Critical depth rate for polynomial tails: (n^{alpha/2} p)^{1/(2 alpha + 1)}.
double nu_pol(double n, double p, double alpha);

// Depth threshold for bounded support with density ~ x^{alpha-1} near the endpoint,
// alpha > 1/2: (n^{alpha/2} / p)^{1/(2 alpha - 1)}.
double bounded_threshold(double n, double p, double alpha);

// Finite-(n, p) diagnostics for the rate results. Limit statements ("-> 0", "o(.)")
// are reported as numbers plus a label; nothing here asserts they hold.
struct RegimeReport {
  double n = 0, p = 0, alpha = 0;
  std::optional<double> j0;
  TailFamily family = TailFamily::bounded;
  // The applicable depth scale: nu_exp, nu_pol, the bounded threshold, or p when the
  // bounded theory allows every rank.
  double nu = 0;
  double ratio = 0;  // p^2 / n^alpha
  std::optional<double> bounded_threshold;
  std::optional<double> log_term;  // (log j0)^{2 alpha} p^2 / n^alpha
  bool degenerate = false;         // ratio >= 1: bounded-support failure regime
  std::string regime;
  std::string notes;
};

RegimeReport classify_bounded(double n, double p, double alpha,
                              std::optional<double> j0 = std::nullopt);

// Dispatches on family; exponential and polynomial fill nu and ratio only.
RegimeReport evaluate_regime(TailFamily family, double n, double p, double alpha,
                             std::optional<double> j0 = std::nullopt);

}  // namespace rankvar
