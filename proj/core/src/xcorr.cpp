#include "isingmkt/xcorr.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "isingmkt/csv.hpp"
#include "isingmkt/error.hpp"
#include "isingmkt/thread_pool.hpp"
#include "json.hpp"

namespace isingmkt {

std::string_view to_string(CorrelationMode m) noexcept {
  return m == CorrelationMode::Return ? "return" : "absolute-return";
}

std::string_view to_string(Normalization n) noexcept {
  return n == Normalization::WindowLocal ? "window" : "global";
}

CorrelationMode parse_mode(std::string_view s) {
  if (s == "return") return CorrelationMode::Return;
  if (s == "absolute-return" || s == "abs") return CorrelationMode::AbsoluteReturn;
  throw InvalidArgument("unknown correlation mode '" + std::string(s) + "'");
}

Normalization parse_normalization(std::string_view s) {
  if (s == "window" || s == "local") return Normalization::WindowLocal;
  if (s == "global") return Normalization::Global;
  throw InvalidArgument("unknown normalization '" + std::string(s) + "'");
}

void validate_window(const WindowSpec& spec, std::size_t steps) {
  if (spec.window < 1) throw InvalidArgument("window.M must be at least 1");
  if (spec.stride < 1) throw InvalidArgument("window.stride must be at least 1");
  if (spec.window > steps) {
    throw InvalidArgument("window.M = " + std::to_string(spec.window) + " exceeds series length " +
                          std::to_string(steps));
  }
}

std::size_t window_count(std::size_t steps, const WindowSpec& spec) noexcept {
  if (spec.window == 0 || spec.stride == 0 || steps < spec.window) return 0;
  return (steps - spec.window) / spec.stride + 1;
}

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(const double* x, std::size_t n) {
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += (x[i] - mean) * (x[i] - mean);
  var /= static_cast<double>(n);
  bool constant = true;
  for (std::size_t i = 1; i < n && constant; ++i) constant = x[i] == x[0];
  return {mean, constant ? 0.0 : std::sqrt(var)};
}

CorrelationWindow correlate_window(const RowMatrix& data, std::size_t end, std::size_t m,
                                   const std::vector<Moments>* global) {
  const auto n = data.rows();
  const std::size_t begin = end - m;
  RowMatrix z(n, static_cast<Eigen::Index>(m));
  CorrelationWindow w;
  w.window_end = static_cast<long>(end);

  for (Eigen::Index k = 0; k < n; ++k) {
    const double* x = data.data() + k * data.cols() + static_cast<Eigen::Index>(begin);
    const Moments mo = global ? (*global)[static_cast<std::size_t>(k)] : moments(x, m);
    if (!(mo.sd > 0.0)) {
      w.degenerate_assets.push_back(static_cast<std::size_t>(k));
      z.row(k).setZero();
      continue;
    }
    for (std::size_t t = 0; t < m; ++t) z(k, static_cast<Eigen::Index>(t)) = (x[t] - mo.mean) / mo.sd;
  }

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  c.selfadjointView<Eigen::Lower>().rankUpdate(z, 1.0 / static_cast<double>(m));
  c = c.selfadjointView<Eigen::Lower>();
  for (auto k : w.degenerate_assets) c(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
  w.matrix = std::move(c);
  return w;
}

}  // namespace

std::vector<CorrelationWindow> rolling_correlations(const ReturnPanel& panel, const WindowSpec& spec,
                                                    ThreadPool* pool) {
  validate_window(spec, panel.steps());
  const RowMatrix data =
      spec.mode == CorrelationMode::AbsoluteReturn ? RowMatrix(panel.values().cwiseAbs()) : panel.values();

  std::vector<Moments> global;
  if (spec.normalization == Normalization::Global) {
    global.reserve(panel.assets());
    for (std::size_t k = 0; k < panel.assets(); ++k) {
      global.push_back(moments(data.data() + k * panel.steps(), panel.steps()));
    }
  }
  const auto* global_ptr = spec.normalization == Normalization::Global ? &global : nullptr;

  const std::size_t count = window_count(panel.steps(), spec);
  std::vector<CorrelationWindow> out(count);
  auto body = [&](std::size_t i) {
    out[i] = correlate_window(data, spec.window + i * spec.stride, spec.window, global_ptr);
  };
  if (pool) {
    pool->parallel_for(count, body);
  } else {
    for (std::size_t i = 0; i < count; ++i) body(i);
  }
  return out;
}

bool CorrelationCheck::ok(std::size_t n) const noexcept {
  constexpr double tol = 1e-12;
  return max_asymmetry <= tol && max_diagonal_error <= tol && max_abs_entry <= 1.0 + tol &&
         min_eigenvalue >= -1e-8 * static_cast<double>(n);
}

CorrelationCheck check_correlation(const Eigen::MatrixXd& c) {
  CorrelationCheck r;
  if (c.rows() != c.cols()) throw DimensionMismatch("correlation matrix must be square");
  r.max_asymmetry = (c - c.transpose()).cwiseAbs().maxCoeff();
  r.max_diagonal_error = (c.diagonal().array() - 1.0).abs().maxCoeff();
  r.max_abs_entry = c.cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  return r;
}

void save_correlation_csv(const std::string& path, const Eigen::MatrixXd& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  csv::Writer w(out);
  std::vector<std::string> names;
  for (Eigen::Index k = 0; k < c.cols(); ++k) names.push_back("a" + std::to_string(k));
  w.header(names);
  std::vector<double> row(static_cast<std::size_t>(c.cols()));
  for (Eigen::Index j = 0; j < c.rows(); ++j) {
    for (Eigen::Index k = 0; k < c.cols(); ++k) row[static_cast<std::size_t>(k)] = c(j, k);
    w.row(row);
  }
}

Eigen::MatrixXd load_correlation_csv(const std::string& path) {
  const csv::Table t = csv::load_table(path);
  const auto n = static_cast<Eigen::Index>(t.header.size());
  if (static_cast<Eigen::Index>(t.rows.size()) != n) throw ParseError("correlation CSV is not square");
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) c(j, k) = t.rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
  }
  return c;
}

std::vector<std::string> save_correlations(const std::string& dir,
                                           const std::vector<CorrelationWindow>& windows,
                                           const WindowSpec& spec) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> files;
  nlohmann::ordered_json manifest;
  manifest["mode"] = to_string(spec.mode);
  manifest["normalization"] = to_string(spec.normalization);
  manifest["window"] = spec.window;
  manifest["stride"] = spec.stride;
  auto& list = manifest["windows"] = nlohmann::ordered_json::array();
  for (const auto& w : windows) {
    const std::string name = "C_" + std::to_string(w.window_end) + ".csv";
    const std::string path = (fs::path(dir) / name).string();
    save_correlation_csv(path, w.matrix);
    files.push_back(path);
    list.push_back({{"window_end", w.window_end},
                    {"file", name},
                    {"degenerate", w.degenerate()},
                    {"degenerate_assets", w.degenerate_assets}});
  }
  const std::string mpath = (fs::path(dir) / "manifest.json").string();
  std::ofstream out(mpath, std::ios::binary);
  if (!out) throw Error("cannot open '" + mpath + "' for writing");
  out << manifest.dump(2) << '\n';
  files.push_back(mpath);
  return files;
}

}  // namespace isingmkt
