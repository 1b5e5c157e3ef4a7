#include "isingmkt/panel.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "isingmkt/csv.hpp"
#include "isingmkt/error.hpp"

namespace isingmkt {

ReturnPanel::ReturnPanel(std::size_t assets, std::size_t steps)
    : values_(RowMatrix::Zero(static_cast<Eigen::Index>(assets), static_cast<Eigen::Index>(steps))) {}

ReturnPanel::ReturnPanel(RowMatrix values) : values_(std::move(values)) {}

std::span<const double> ReturnPanel::row(std::size_t k) const {
  return {values_.data() + k * steps(), steps()};
}

std::span<double> ReturnPanel::row(std::size_t k) {
  return {values_.data() + k * steps(), steps()};
}

ReturnPanel ReturnPanel::absolute() const { return ReturnPanel(RowMatrix(values_.cwiseAbs())); }

ReturnPanel ReturnPanel::squared() const { return ReturnPanel(RowMatrix(values_.cwiseAbs2())); }

void write_panel_csv(std::ostream& out, const ReturnPanel& panel) {
  out << 't';
  for (std::size_t k = 0; k < panel.assets(); ++k) out << ",a" << k;
  out << '\n';
  for (std::size_t t = 0; t < panel.steps(); ++t) {
    out << t;
    for (std::size_t k = 0; k < panel.assets(); ++k) out << ',' << csv::format_double(panel(k, t));
    out << '\n';
  }
}

ReturnPanel read_panel_csv(std::istream& in) {
  const csv::Table table = csv::read_table(in);
  if (table.header.empty() || table.header.front() != "t") {
    throw ParseError("panel CSV must start with a 't' column");
  }
  const std::size_t assets = table.header.size() - 1;
  for (std::size_t k = 0; k < assets; ++k) {
    if (table.header[k + 1] != "a" + std::to_string(k)) {
      throw ParseError("panel CSV column " + std::to_string(k + 1) + " should be a" +
                       std::to_string(k));
    }
  }
  ReturnPanel panel(assets, table.rows.size());
  for (std::size_t t = 0; t < table.rows.size(); ++t) {
    if (table.rows[t][0] != static_cast<double>(t)) {
      throw ParseError("panel CSV time column is not 0,1,2,... at row " + std::to_string(t));
    }
    for (std::size_t k = 0; k < assets; ++k) panel(k, t) = table.rows[t][k + 1];
  }
  return panel;
}

void save_panel_csv(const std::string& path, const ReturnPanel& panel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_panel_csv(out, panel);
  if (!out) throw Error("write to '" + path + "' failed");
}

ReturnPanel load_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return read_panel_csv(in);
}

}  // namespace isingmkt
