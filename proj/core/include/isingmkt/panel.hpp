#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>

#include <Eigen/Core>

namespace isingmkt {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// N x T matrix of per-asset time series. Rows are assets, columns time.
///
/// Simulated returns live in [-1, 1]; derived panels (normalized or
/// transformed returns) reuse the type without that bound.
class ReturnPanel {
public:
  ReturnPanel() = default;
  ReturnPanel(std::size_t assets, std::size_t steps);
  explicit ReturnPanel(RowMatrix values);

  std::size_t assets() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t steps() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  bool empty() const noexcept { return values_.size() == 0; }

  double operator()(std::size_t k, std::size_t t) const { return values_(k, t); }
  double& operator()(std::size_t k, std::size_t t) { return values_(k, t); }

  std::span<const double> row(std::size_t k) const;
  std::span<double> row(std::size_t k);

  const RowMatrix& values() const noexcept { return values_; }
  RowMatrix& values() noexcept { return values_; }

  /// Element-wise |R| and R^2.
  ReturnPanel absolute() const;
  ReturnPanel squared() const;

  friend bool operator==(const ReturnPanel& a, const ReturnPanel& b) {
    return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
           a.values_ == b.values_;
  }

private:
  RowMatrix values_;
};

/// CSV with header `t,a0,a1,...`: one row per time step, one column per asset.
void write_panel_csv(std::ostream& out, const ReturnPanel& panel);
ReturnPanel read_panel_csv(std::istream& in);

void save_panel_csv(const std::string& path, const ReturnPanel& panel);
ReturnPanel load_panel_csv(const std::string& path);

}  // namespace isingmkt
