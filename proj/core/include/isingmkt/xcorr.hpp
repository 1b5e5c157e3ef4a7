#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "isingmkt/panel.hpp"

namespace isingmkt {

class ThreadPool;

enum class CorrelationMode { Return, AbsoluteReturn };

/// Where the per-asset mean and standard deviation come from.
///  - WindowLocal: computed inside each window (unit diagonal exactly).
///  - Global: computed once over the full series, then averaged per window.
enum class Normalization { WindowLocal, Global };

std::string_view to_string(CorrelationMode m) noexcept;
std::string_view to_string(Normalization n) noexcept;
/// Accepts "return"/"absolute-return" and "window"/"global".
CorrelationMode parse_mode(std::string_view s);
Normalization parse_normalization(std::string_view s);

struct WindowSpec {
  std::size_t window = 400;
  std::size_t stride = 400;
  CorrelationMode mode = CorrelationMode::Return;
  Normalization normalization = Normalization::WindowLocal;
};

/// Throws InvalidArgument unless 1 <= window <= steps and stride >= 1.
void validate_window(const WindowSpec& spec, std::size_t steps);

/// floor((T - M) / stride) + 1, or 0 when T < M.
std::size_t window_count(std::size_t steps, const WindowSpec& spec) noexcept;

/// Equal-time correlation matrix of the window ending at `window_end`
/// (exclusive), i.e. samples [window_end - M, window_end).
struct CorrelationWindow {
  long window_end = 0;
  Eigen::MatrixXd matrix;
  /// Assets with zero variance in this window. Their rows and columns are
  /// zero off the diagonal and one on it.
  std::vector<std::size_t> degenerate_assets;

  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
  bool degenerate() const noexcept { return !degenerate_assets.empty(); }
};

/// One matrix per window end in {M, M + stride, ...}, in time order.
/// In AbsoluteReturn mode the panel is replaced by |R| first.
std::vector<CorrelationWindow> rolling_correlations(const ReturnPanel& panel, const WindowSpec& spec,
                                                    ThreadPool* pool = nullptr);

/// Result of checking the correlation-matrix invariants on one matrix.
struct CorrelationCheck {
  double max_asymmetry = 0.0;
  double max_diagonal_error = 0.0;
  double max_abs_entry = 0.0;
  double min_eigenvalue = 0.0;

  /// Symmetry, unit diagonal and range to 1e-12; min eigenvalue >= -1e-8 * N.
  bool ok(std::size_t n) const noexcept;
};

CorrelationCheck check_correlation(const Eigen::MatrixXd& c);

/// Dense CSV with header `a0,...,a{N-1}` and N rows.
void save_correlation_csv(const std::string& path, const Eigen::MatrixXd& c);
Eigen::MatrixXd load_correlation_csv(const std::string& path);

/// Writes `<dir>/C_<window_end>.csv` for every window plus
/// `<dir>/manifest.json` (window ends, mode, spec, degenerate flags).
/// Returns the paths written, manifest last.
std::vector<std::string> save_correlations(const std::string& dir,
                                           const std::vector<CorrelationWindow>& windows,
                                           const WindowSpec& spec);

}  // namespace isingmkt
