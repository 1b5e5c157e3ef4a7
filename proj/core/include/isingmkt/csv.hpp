#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace isingmkt::csv {

/// Shortest round-trip is not required here: every float is written with
/// exactly 17 significant digits so files are stable across platforms.
std::string format_double(double v);

/// Strict parse of a full field; throws ParseError on trailing junk.
double parse_double(std::string_view field);
long long parse_int(std::string_view field);

/// Splits one line on commas. No quoting; fields are numbers or simple names.
std::vector<std::string_view> split(std::string_view line);

/// Reads one line, stripping a trailing '\r'. Returns false at EOF.
bool read_line(std::istream& in, std::string& line);

/// Writes `header` then one line per row; cell (r, c) comes from cell(r, c).
class Writer {
public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  /// First column written as an integer, the rest as doubles.
  void row(long long key, const std::vector<double>& values);
  void row(long long key1, long long key2, const std::vector<double>& values);

private:
  std::ostream& out_;
};

/// Parsed numeric table with its header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const;
};

Table read_table(std::istream& in);
Table load_table(const std::string& path);

}  // namespace isingmkt::csv
