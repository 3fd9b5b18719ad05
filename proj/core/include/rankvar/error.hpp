#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rankvar {

// Broad grouping used by the CLI to pick an exit code.
enum class ErrorCategory { usage, data, resource };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ErrorCategory category() const noexcept { return ErrorCategory::usage; }
};

// Argument outside the mathematical domain of a function (u outside (0,1), n < 2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Caller passed an inconsistent argument (k > p, empty sample, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// ExperimentConfig failed validation before any sampling.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input file could not be read as the declared format. Carries a 1-based line number
// (0 when the problem is not tied to a line, e.g. an empty file).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }
  ErrorCategory category() const noexcept override { return ErrorCategory::data; }

 private:
  std::size_t line_;
};

// Parsed data violates a dataset invariant (single class, successes > trials, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
  ErrorCategory category() const noexcept override { return ErrorCategory::data; }
};

// Estimator or fit is undefined on the supplied data.
class EstimateError : public Error {
 public:
  using Error::Error;
  ErrorCategory category() const noexcept override { return ErrorCategory::data; }
};

class ResourceError : public Error {
 public:
  using Error::Error;
  ErrorCategory category() const noexcept override { return ErrorCategory::resource; }
};

class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, double sd_low, double sd_high, double p_low,
                   double p_high)
      : Error(what), sd_low_(sd_low), sd_high_(sd_high), p_low_(p_low), p_high_(p_high) {}
  ErrorCategory category() const noexcept override { return ErrorCategory::resource; }
  double sd_low() const noexcept { return sd_low_; }
  double sd_high() const noexcept { return sd_high_; }
  double probability_at_low() const noexcept { return p_low_; }
  double probability_at_high() const noexcept { return p_high_; }

 private:
  double sd_low_, sd_high_, p_low_, p_high_;
};

}  // namespace rankvar
