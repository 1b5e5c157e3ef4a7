#include "isingmkt/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "isingmkt/error.hpp"

namespace isingmkt::csv {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

double parse_double(std::string_view field) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw ParseError("not a number: '" + std::string(field) + "'");
  }
  return v;
}

long long parse_int(std::string_view field) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("not an integer: '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void Writer::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out_ << ',';
    out_ << names[i];
  }
  out_ << '\n';
}

void Writer::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_double(values[i]);
  }
  out_ << '\n';
}

void Writer::row(long long key, const std::vector<double>& values) {
  out_ << key;
  for (double v : values) out_ << ',' << format_double(v);
  out_ << '\n';
}

void Writer::row(long long key1, long long key2, const std::vector<double>& values) {
  out_ << key1 << ',' << key2;
  for (double v : values) out_ << ',' << format_double(v);
  out_ << '\n';
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ParseError("missing column '" + std::string(name) + "'");
}

Table read_table(std::istream& in) {
  Table table;
  std::string line;
  if (!read_line(in, line)) throw ParseError("empty CSV input");
  for (auto f : split(line)) table.header.emplace_back(f);
  std::size_t lineno = 1;
  while (read_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != table.header.size()) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(table.header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    auto& row = table.rows.emplace_back();
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_double(f));
  }
  return table;
}

Table load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return read_table(in);
}

}  // namespace isingmkt::csv
