#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rankvar/dataset.hpp"

namespace rankvar {

// Dataset CSV formats:
//   replicates  long:  header "item,value", one row per observation (ragged n_j allowed)
//   twoclass    wide:  header "label,<item>,<item>,...", one row per observation, label 0|1
//   binomial          header "item,successes,trials"
// Parse failures throw ParseError with the 1-based line; dataset invariants that fail
// after parsing throw ValidationError.

Replicates parse_replicates(std::istream& in, std::string_view source = "<stream>");
TwoClass parse_twoclass(std::istream& in, std::string_view source = "<stream>");
Binomial parse_binomial(std::istream& in, std::string_view source = "<stream>");

Replicates parse_replicates(const std::filesystem::path& path);
TwoClass parse_twoclass(const std::filesystem::path& path);
Binomial parse_binomial(const std::filesystem::path& path);

void write_replicates(std::ostream& out, const Replicates& ds);
void write_twoclass(std::ostream& out, const TwoClass& ds);
void write_binomial(std::ostream& out, const Binomial& ds);

// Shortest text that parses back to exactly v (17 significant digits, "nan", "inf").
std::string format_real(double v);

// Splits one CSV record. Fields may be double-quoted with "" as an escaped quote.
// Throws ParseError on an unterminated quote.
std::vector<std::string> split_csv_record(std::string_view line, std::string_view source,
                                          std::size_t line_no);

// Quotes a field only when it contains a comma, quote, or leading/trailing space.
std::string csv_field(std::string_view text);

// A flat table with a header row; every cell is preformatted text.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const;
  static CsvTable read(std::istream& in, std::string_view source = "<stream>");
  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

}  // namespace rankvar
