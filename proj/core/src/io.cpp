#include "rankvar/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "rankvar/error.hpp"

namespace rankvar {
namespace {

// Reads lines, tracking 1-based numbers and dropping a trailing '\r'.
class LineReader {
 public:
  LineReader(std::istream& in, std::string_view source) : in_(in), source_(source) {}

  // Next nonblank line; false at end of input.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line_no_ == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }

  std::vector<std::string> fields(const std::string& line) const {
    return split_csv_record(line, source_, line_no_);
  }

  std::size_t line() const noexcept { return line_no_; }
  const std::string& source() const noexcept { return source_; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double parse_value(const LineReader& r, const std::string& field, std::string_view column) {
  const std::string t = trim(field);
  char* end = nullptr;
  const double v = t.empty() ? 0.0 : std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    r.fail("non-numeric " + std::string(column) + " '" + field + "'");
  if (!std::isfinite(v)) r.fail("non-finite " + std::string(column) + " '" + field + "'");
  return v;
}

std::uint64_t parse_count(const LineReader& r, const std::string& field, std::string_view column) {
  const std::string t = trim(field);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    r.fail("expected a nonnegative integer for " + std::string(column) + ", got '" + field + "'");
  return v;
}

void expect_header(LineReader& r, const std::vector<std::string>& expected) {
  std::string line;
  if (!r.next(line)) throw ParseError(r.source(), 0, "empty file");
  auto fields = r.fields(line);
  if (fields != expected) {
    std::string want;
    for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
    r.fail("missing or malformed header (expected '" + want + "')");
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

}  // namespace

std::vector<std::string> split_csv_record(std::string_view line, std::string_view source,
                                          std::size_t line_no) {
  // Unquoted fields are trimmed; quoted fields keep their content verbatim.
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  auto flush = [&] {
    out.push_back(was_quoted ? std::move(field) : trim(field));
    field.clear();
    was_quoted = false;
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == ',') {
      flush();
    } else if (was_quoted) {
      if (c != ' ' && c != '\t')
        throw ParseError(std::string(source), line_no, "text after closing quote");
    } else if (c == '"' && trim(field).empty()) {
      field.clear();
      quoted = was_quoted = true;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError(std::string(source), line_no, "unterminated quoted field");
  flush();
  return out;
}

std::string csv_field(std::string_view text) {
  const bool needs = text.find_first_of(",\"\n\r") != std::string_view::npos ||
                     (!text.empty() && (text.front() == ' ' || text.back() == ' '));
  if (!needs) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Replicates parse_replicates(std::istream& in, std::string_view source) {
  LineReader r(in, source);
  expect_header(r, {"item", "value"});
  Replicates ds;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  while (r.next(line)) {
    const auto f = r.fields(line);
    if (f.size() != 2) r.fail("expected 2 fields (item,value), got " + std::to_string(f.size()));
    std::string id = f[0];
    if (id.empty()) r.fail("empty item id");
    const double v = parse_value(r, f[1], "value");
    auto [it, inserted] = index.try_emplace(id, ds.items.size());
    if (inserted) ds.items.push_back({std::move(id), {}});
    ds.items[it->second].samples.push_back(v);
  }
  if (ds.items.empty()) throw ParseError(r.source(), r.line(), "no data rows");
  validate(ds);
  return ds;
}

TwoClass parse_twoclass(std::istream& in, std::string_view source) {
  LineReader r(in, source);
  std::string line;
  if (!r.next(line)) throw ParseError(r.source(), 0, "empty file");
  auto header = r.fields(line);
  if (header.empty() || header[0] != "label")
    r.fail("missing or malformed header (first column must be 'label')");
  if (header.size() < 2) r.fail("header names no items");
  TwoClass ds;
  ds.item_ids.assign(header.begin() + 1, header.end());
  for (const auto& id : ds.item_ids)
    if (id.empty()) r.fail("empty item id in header");
  const std::size_t p = ds.item_ids.size();
  std::vector<std::vector<double>> columns(p);
  while (r.next(line)) {
    const auto f = r.fields(line);
    if (f.size() != p + 1)
      r.fail("ragged row: expected " + std::to_string(p + 1) + " fields, got " +
             std::to_string(f.size()));
    const std::string label = trim(f[0]);
    if (label != "0" && label != "1") r.fail("label must be 0 or 1, got '" + f[0] + "'");
    ds.labels.push_back(label == "1" ? 1 : 0);
    for (std::size_t j = 0; j < p; ++j) columns[j].push_back(parse_value(r, f[j + 1], ds.item_ids[j]));
  }
  if (ds.labels.empty()) throw ParseError(r.source(), r.line(), "no data rows");
  ds.values.reserve(p * ds.labels.size());
  for (auto& c : columns) ds.values.insert(ds.values.end(), c.begin(), c.end());
  validate(ds);
  return ds;
}

Binomial parse_binomial(std::istream& in, std::string_view source) {
  LineReader r(in, source);
  expect_header(r, {"item", "successes", "trials"});
  Binomial ds;
  std::string line;
  while (r.next(line)) {
    const auto f = r.fields(line);
    if (f.size() != 3)
      r.fail("expected 3 fields (item,successes,trials), got " + std::to_string(f.size()));
    BinomialItem it;
    it.id = f[0];
    if (it.id.empty()) r.fail("empty item id");
    it.successes = parse_count(r, f[1], "successes");
    it.trials = parse_count(r, f[2], "trials");
    if (it.successes > it.trials)
      throw ValidationError(r.source() + ":" + std::to_string(r.line()) +
                            ": successes exceed trials for item '" + it.id + "'");
    if (it.trials == 0)
      throw ValidationError(r.source() + ":" + std::to_string(r.line()) +
                            ": zero trials for item '" + it.id + "'");
    ds.items.push_back(std::move(it));
  }
  if (ds.items.empty()) throw ParseError(r.source(), r.line(), "no data rows");
  validate(ds);
  return ds;
}

Replicates parse_replicates(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_replicates(in, path.string());
}

TwoClass parse_twoclass(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_twoclass(in, path.string());
}

Binomial parse_binomial(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_binomial(in, path.string());
}

void write_replicates(std::ostream& out, const Replicates& ds) {
  out << "item,value\n";
  for (const auto& it : ds.items)
    for (double v : it.samples) out << csv_field(it.id) << ',' << format_real(v) << '\n';
}

void write_twoclass(std::ostream& out, const TwoClass& ds) {
  out << "label";
  for (const auto& id : ds.item_ids) out << ',' << csv_field(id);
  out << '\n';
  for (std::size_t i = 0; i < ds.observations(); ++i) {
    out << static_cast<int>(ds.labels[i]);
    for (std::size_t j = 0; j < ds.items(); ++j) out << ',' << format_real(ds.at(i, j));
    out << '\n';
  }
}

void write_binomial(std::ostream& out, const Binomial& ds) {
  out << "item,successes,trials\n";
  for (const auto& it : ds.items)
    out << csv_field(it.id) << ',' << it.successes << ',' << it.trials << '\n';
}

void CsvTable::write(std::ostream& out) const {
  auto row_out = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_field(cells[i]);
    out << '\n';
  };
  row_out(header);
  for (const auto& r : rows) row_out(r);
}

CsvTable CsvTable::read(std::istream& in, std::string_view source) {
  LineReader r(in, source);
  CsvTable t;
  std::string line;
  if (!r.next(line)) throw ParseError(r.source(), 0, "empty file");
  t.header = r.fields(line);
  while (r.next(line)) {
    auto f = r.fields(line);
    if (f.size() != t.header.size()) r.fail("ragged row");
    t.rows.push_back(std::move(f));
  }
  return t;
}

}  // namespace rankvar
