#include "rankvar/scale_rule.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "rankvar/error.hpp"

namespace rankvar {
namespace {

std::string strip_spaces(std::string_view text) {
  std::string out;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

std::string strip_parens(std::string s) {
  while (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  return s;
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

// "4", "0.25", "4/9", "(1/5)".
bool parse_number(std::string s, double& out) {
  s = strip_parens(std::move(s));
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_real(s, out);
  double num = 0, den = 0;
  if (!parse_real(s.substr(0, slash), num) || !parse_real(s.substr(slash + 1), den) || den == 0)
    return false;
  out = num / den;
  return true;
}

[[noreturn]] void bad(std::string_view text) {
  throw ArgumentError("cannot parse count expression '" + std::string(text) +
                      "' (expected an integer or c*n^k)");
}

}  // namespace

std::string_view to_string(Rounding r) noexcept {
  switch (r) {
    case Rounding::nearest: return "nearest";
    case Rounding::floor: return "floor";
    case Rounding::ceil: return "ceil";
  }
  return "?";
}

Rounding parse_rounding(std::string_view text) {
  if (text == "nearest") return Rounding::nearest;
  if (text == "floor") return Rounding::floor;
  if (text == "ceil") return Rounding::ceil;
  throw ArgumentError("unknown rounding '" + std::string(text) + "' (expected nearest|floor|ceil)");
}

ScaleRule ScaleRule::literal(std::size_t value) {
  ScaleRule r;
  r.coef_ = static_cast<double>(value);
  r.exponent_ = 0.0;
  r.text_ = std::to_string(value);
  return r;
}

ScaleRule ScaleRule::power(double coef, double exponent) {
  if (!(coef > 0.0) || !std::isfinite(coef) || !std::isfinite(exponent))
    throw ArgumentError("count expression needs a positive finite coefficient");
  ScaleRule r;
  r.coef_ = coef;
  r.exponent_ = exponent;
  std::ostringstream os;
  os.precision(17);
  os << coef << "*n^" << exponent;
  r.text_ = os.str();
  return r;
}

ScaleRule ScaleRule::parse(std::string_view text) {
  const std::string s = strip_spaces(text);
  if (s.empty()) bad(text);
  const auto npos = s.find('n');
  ScaleRule r;
  if (npos == std::string::npos) {
    double v = 0;
    if (!parse_number(s, v) || !(v > 0)) bad(text);
    r.coef_ = v;
  } else {
    double coef = 1.0;
    if (npos > 0) {
      if (s[npos - 1] != '*') bad(text);
      if (!parse_number(s.substr(0, npos - 1), coef) || !(coef > 0)) bad(text);
    }
    const std::string tail = s.substr(npos + 1);
    double exponent = 1.0;
    if (!tail.empty()) {
      if (tail[0] != '^' || !parse_number(tail.substr(1), exponent)) bad(text);
    }
    r.coef_ = coef;
    r.exponent_ = exponent;
  }
  r.text_ = std::string(text);
  return r;
}

double ScaleRule::raw(std::size_t n) const {
  return exponent_ == 0.0 ? coef_ : coef_ * std::pow(static_cast<double>(n), exponent_);
}

std::size_t ScaleRule::resolve(std::size_t n, Rounding rounding) const {
  const double x = raw(n);
  // The 1e-9 slack keeps floor/ceil from tripping over representation error when
  // c*n^k is mathematically an integer (0.0005 * 2000^2).
  const double v = rounding == Rounding::nearest ? std::round(x)
                   : rounding == Rounding::floor ? std::floor(x + 1e-9)
                                                 : std::ceil(x - 1e-9);
  return v < 1.0 ? 1 : static_cast<std::size_t>(v);
}

}  // namespace rankvar
