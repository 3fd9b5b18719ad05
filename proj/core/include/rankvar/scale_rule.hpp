#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace rankvar {

enum class Rounding { nearest, floor, ceil };

std::string_view to_string(Rounding r) noexcept;
Rounding parse_rounding(std::string_view text);

// A count that may grow with the sample size: coef * n^exponent, rounded to an integer
// (nearest by default) with a minimum of 1. Literal counts have exponent 0.
//
// Accepted text: "7", "n^0.25", "0.0005*n^2", "(1/5)*n^(4/9)", "1/5*n^0.55", "2*n^(1/6)".
class ScaleRule {
 public:
  ScaleRule() = default;
  static ScaleRule literal(std::size_t value);
  static ScaleRule power(double coef, double exponent);
  // Throws ArgumentError naming the offending text.
  static ScaleRule parse(std::string_view text);

  std::size_t resolve(std::size_t n, Rounding rounding = Rounding::nearest) const;
  double raw(std::size_t n) const;

  double coef() const noexcept { return coef_; }
  double exponent() const noexcept { return exponent_; }
  bool depends_on_n() const noexcept { return exponent_ != 0.0; }
  // Text as given to parse(), or a canonical rendering for programmatic rules.
  const std::string& text() const noexcept { return text_; }

 private:
  double coef_ = 1.0;
  double exponent_ = 0.0;
  std::string text_ = "1";
};

}  // namespace rankvar
