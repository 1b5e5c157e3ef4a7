#include "isingmkt/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "isingmkt/csv.hpp"
#include "isingmkt/error.hpp"
#include "isingmkt/thread_pool.hpp"

namespace isingmkt {

EigenDecomposition eig_sym(const Eigen::MatrixXd& a, long window_end) {
  if (a.rows() != a.cols()) throw EigenFailure(window_end, "eig_sym: matrix is not square");
  if (a.size() == 0) throw EigenFailure(window_end, "eig_sym: empty matrix");
  if (!a.allFinite()) throw EigenFailure(window_end, "eig_sym: non-finite entries");
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9) {
    throw EigenFailure(window_end, "eig_sym: matrix is not symmetric (max asymmetry " +
                                       std::to_string(asym) + ")");
  }

  // The 2 x 2 closed form is exact on simple inputs where the iterative
  // solver is off by an ulp.
  Eigen::VectorXd ev;
  Eigen::MatrixXd vecs;
  if (a.rows() == 2) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
    es.computeDirect(Eigen::Matrix2d(a));
    ev = es.eigenvalues();
    vecs = es.eigenvectors();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) {
      throw EigenFailure(window_end, "eig_sym: solver did not converge for window " +
                                         std::to_string(window_end));
    }
    ev = es.eigenvalues();
    vecs = es.eigenvectors();
  }

  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return ev(x) > ev(y); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index l = 0; l < n; ++l) {
    const Eigen::Index src = order[static_cast<std::size_t>(l)];
    out.values(l) = ev(src);
    Eigen::VectorXd v = vecs.col(src);
    Eigen::Index big = 0;
    for (Eigen::Index j = 1; j < n; ++j) {
      if (std::fabs(v(j)) > std::fabs(v(big))) big = j;
    }
    if (v(big) < 0.0) v = -v;
    out.vectors.col(l) = v;
  }
  return out;
}

double crf(std::span<const double> eig, std::size_t m) {
  if (m < 1 || m > eig.size()) throw InvalidArgument("crf: m must lie in [1, N]");
  double top = 0.0;
  for (std::size_t j = 0; j < m; ++j) top += eig[j];
  double total = top;
  for (std::size_t j = m; j < eig.size(); ++j) total += eig[j];
  return top / total;
}

std::vector<double> crf_curve(std::span<const double> eig) {
  if (eig.empty()) throw InvalidArgument("crf_curve: empty spectrum");
  const double total = std::accumulate(eig.begin(), eig.end(), 0.0);
  std::vector<double> out(eig.size());
  double partial = 0.0;
  for (std::size_t m = 0; m < eig.size(); ++m) {
    partial += eig[m];
    out[m] = partial / total;
  }
  return out;
}

double MpReference::density(double lambda) const noexcept {
  if (lambda <= lambda_minus || lambda >= lambda_plus) return 0.0;
  return q / (2.0 * std::numbers::pi) * std::sqrt((lambda_plus - lambda) * (lambda - lambda_minus)) /
         lambda;
}

std::vector<std::pair<double, double>> MpReference::sample(std::size_t points) const {
  std::vector<std::pair<double, double>> out;
  if (points == 0) return out;
  out.reserve(points);
  const double span = lambda_plus - lambda_minus;
  for (std::size_t i = 0; i < points; ++i) {
    const double frac = points == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(points - 1);
    const double lambda = lambda_minus + span * frac;
    out.emplace_back(lambda, density(lambda));
  }
  return out;
}

MpReference mp_reference(std::size_t t_window, std::size_t n_assets) {
  if (n_assets == 0 || t_window <= n_assets) {
    throw InvalidArgument("mp_reference: Q = T/N must exceed 1 (T=" + std::to_string(t_window) +
                          ", N=" + std::to_string(n_assets) + ")");
  }
  MpReference r;
  r.q = static_cast<double>(t_window) / static_cast<double>(n_assets);
  const double inv_q = 1.0 / r.q;
  r.lambda_minus = 1.0 + inv_q - 2.0 * std::sqrt(inv_q);
  r.lambda_plus = 1.0 + inv_q + 2.0 * std::sqrt(inv_q);
  return r;
}

namespace {

void require_unit_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  if (std::fabs(std::sqrt(s) - 1.0) > 1e-6) {
    throw InvalidArgument("participation ratio needs a unit vector (norm " + std::to_string(std::sqrt(s)) + ")");
  }
}

}  // namespace

double ipr(std::span<const double> v) {
  require_unit_norm(v);
  double s = 0.0;
  for (double x : v) {
    const double x2 = x * x;
    s += x2 * x2;
  }
  return s;
}

double ipr6(std::span<const double> v) {
  require_unit_norm(v);
  double s = 0.0;
  for (double x : v) {
    const double x2 = x * x;
    s += x2 * x2 * x2;
  }
  return s;
}

SpectralSummary summarize(const CorrelationWindow& window, std::size_t t_window, bool keep_vectors) {
  EigenDecomposition ed = eig_sym(window.matrix, window.window_end);
  const auto n = static_cast<std::size_t>(ed.values.size());

  SpectralSummary s;
  s.window_end = window.window_end;
  s.degenerate_window = window.degenerate();
  s.crf = crf_curve(std::span<const double>(ed.values.data(), n));
  s.ipr.resize(n);
  s.ipr6.resize(n);
  s.non_unique.assign(n, false);
  for (std::size_t l = 0; l < n; ++l) {
    const auto li = static_cast<Eigen::Index>(l);
    const std::span<const double> v(ed.vectors.col(li).data(), n);
    s.ipr[l] = ipr(v);
    s.ipr6[l] = ipr6(v);
    const bool close_above = l > 0 && std::fabs(ed.values(li - 1) - ed.values(li)) < 1e-10;
    const bool close_below = l + 1 < n && std::fabs(ed.values(li) - ed.values(li + 1)) < 1e-10;
    s.non_unique[l] = close_above || close_below;
  }
  if (t_window > n) s.mp = mp_reference(t_window, n);
  s.eigenvalues = std::move(ed.values);
  if (keep_vectors) s.eigenvectors = std::move(ed.vectors);
  return s;
}

SpectralTrajectory spectral_trajectory(const std::vector<CorrelationWindow>& windows, std::size_t top_m,
                                       std::size_t t_window, ThreadPool* pool, bool keep_vectors) {
  SpectralTrajectory traj;
  if (windows.empty()) return traj;
  const std::size_t n = windows.front().size();
  for (const auto& w : windows) {
    if (w.size() != n) throw DimensionMismatch("correlation windows disagree on asset count");
  }
  if (top_m < 1 || top_m > n) throw InvalidArgument("top_m must lie in [1, N]");
  traj.top_m = top_m;

  std::vector<std::optional<SpectralSummary>> slots(windows.size());
  std::vector<std::string> errors(windows.size());
  auto body = [&](std::size_t i) {
    try {
      slots[i] = summarize(windows[i], t_window, keep_vectors);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  };
  if (pool) {
    pool->parallel_for(windows.size(), body);
  } else {
    for (std::size_t i = 0; i < windows.size(); ++i) body(i);
  }
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (slots[i]) {
      traj.windows.push_back(std::move(*slots[i]));
    } else {
      traj.failures.push_back({windows[i].window_end, errors[i]});
    }
  }
  return traj;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void save_crf_csv(const std::string& path, const SpectralTrajectory& traj) {
  auto out = open_out(path);
  csv::Writer w(out);
  std::vector<std::string> head{"window_end"};
  for (std::size_t m = 1; m <= traj.top_m; ++m) head.push_back("CRF" + std::to_string(m));
  w.header(head);
  for (const auto& s : traj.windows) {
    w.row(s.window_end, std::vector<double>(s.crf.begin(), s.crf.begin() + static_cast<std::ptrdiff_t>(traj.top_m)));
  }
}

void save_ipr_csv(const std::string& path, const SpectralTrajectory& traj) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.header({"window_end", "IPR1", "IPR6_1"});
  for (const auto& s : traj.windows) w.row(s.window_end, {s.ipr.front(), s.ipr6.front()});
}

void save_scatter_csv(const std::string& path, const SpectralTrajectory& traj) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.header({"window_end", "l", "lambda", "ipr"});
  for (const auto& s : traj.windows) {
    for (std::size_t l = 0; l < traj.top_m; ++l) {
      w.row(s.window_end, static_cast<long long>(l + 1),
            {s.eigenvalues(static_cast<Eigen::Index>(l)), s.ipr[l]});
    }
  }
}

void save_mp_csv(const std::string& path, const MpReference& ref, std::size_t points) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.header({"lambda", "rho"});
  for (const auto& [lambda, rho] : ref.sample(points)) w.row({lambda, rho});
}

}  // namespace isingmkt
