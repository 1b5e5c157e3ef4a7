// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Desk-scale runs are written under the scratch directory
// given as the first argument (default: a temp directory).

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "commands.hpp"
#include "config.hpp"
#include "isingmkt/csv.hpp"
#include "isingmkt/panel.hpp"
#include "isingmkt/series.hpp"
#include "isingmkt/spectra.hpp"
#include "isingmkt/thread_pool.hpp"
#include "isingmkt/xcorr.hpp"
#include "oracles/jacobi_eigen.hpp"
#include "oracles/synthetic.hpp"

namespace fs = std::filesystem;
using namespace isingmkt;
using namespace isingmkt::app;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path g_scratch;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Runs the desk pipeline once per (seed, threads) and reuses the result.
fs::path desk_run(std::uint64_t seed, std::size_t threads = 1) {
  const fs::path out = g_scratch / fmt::format("desk_s{}_t{}", seed, threads);
  if (fs::exists(out / "manifest.json") && fs::exists(out / "spectra_flags.json")) return out;
  fs::remove_all(out);
  ExperimentConfig cfg = desk_preset();
  cfg.model.master_seed = seed;
  cfg.threads = threads;
  cfg.output_dir = out.string();
  validate_config(cfg);
  std::ostringstream log;
  Context ctx(cfg, log);
  cmd_pipeline(ctx);
  return out;
}

double round_sig(double x, int digits) {
  if (x == 0.0) return 0.0;
  const double scale = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::fabs(x)))));
  return std::round(x * scale) / scale;
}

std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) { return pearson(ranks(a), ranks(b)); }

std::vector<double> column(const fs::path& file, const std::string& name) {
  const auto t = csv::load_table(file.string());
  const std::size_t c = t.column(name);
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back(r[c]);
  return out;
}

// 1
Outcome mp_bounds() {
  const auto ref = mp_reference(400, 300);
  const bool ok = round_sig(ref.lambda_plus, 4) == 3.482 && round_sig(ref.lambda_minus, 4) == 0.01795;
  return {ok, fmt::format("lambda+={:.7f} lambda-={:.7f} (want 3.482, 0.01795 to 4 s.f.)", ref.lambda_plus,
                          ref.lambda_minus)};
}

// 2
Outcome rmt_baselines() {
  constexpr std::size_t n = 300;
  constexpr std::size_t draws = 20000;
  std::mt19937_64 eng(20240601);
  double s4 = 0.0, s6 = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    const auto v = oracle::random_unit_vector(n, eng);
    s4 += ipr(v);
    s6 += ipr6(v);
  }
  const double m4 = s4 / draws;
  const double m6 = s6 / draws;
  const double t4 = 3.0 / n;
  const double t6 = 15.0 / (n * n);
  const double e4 = m4 / t4 - 1.0;
  const double e6 = m6 / t6 - 1.0;
  return {std::fabs(e4) <= 0.02 && std::fabs(e6) <= 0.05,
          fmt::format("{} draws, N={}: mean IPR={:.6g} ({:+.2f}% vs 3/N, tol 2%), mean IPR6={:.6g} ({:+.2f}% vs "
                      "15/N^2, tol 5%)",
                      draws, n, m4, 100 * e4, m6, 100 * e6)};
}

// 3
Outcome stylized_facts() {
  const auto dir = desk_run(1);
  const auto panel = load_panel_csv((dir / "returns.csv").string());
  const auto z = normalize_returns(panel);
  const double kurt = distribution_stats(z, true).front().kurtosis;
  const auto ret = mean_acf(panel, 50);
  const auto abs = mean_acf(panel.absolute(), 50);
  const double band = 1.96 / std::sqrt(static_cast<double>(panel.steps()));
  const bool k_ok = kurt > 3.0;
  const bool r_ok = std::fabs(ret.rho[10]) < band;
  const bool a_ok = abs.rho[50] > band;
  return {k_ok && r_ok && a_ok,
          fmt::format("kurtosis={:.3f} (>3 {}), |rho_ret(10)|={:.4f} (<{:.4f} {}), rho_abs(50)={:.4f} (>{:.4f} {})",
                      kurt, k_ok ? "ok" : "FAIL", std::fabs(ret.rho[10]), band, r_ok ? "ok" : "FAIL", abs.rho[50],
                      band, a_ok ? "ok" : "FAIL")};
}

// 4
Outcome eigensolver_oracle() {
  std::mt19937_64 eng(77);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  std::uniform_int_distribution<int> size(1, 6);
  double worst_value = 0.0, worst_residual = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(eng);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = off(eng);
    oracle::Dense d(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = a(i, j);

    const auto ed = eig_sym(a);
    const auto ref = oracle::jacobi_eigen(d);
    for (int l = 0; l < n; ++l) worst_value = std::max(worst_value, std::fabs(ed.values(l) - ref.values[l]));
    const Eigen::MatrixXd recon = ed.vectors * ed.values.asDiagonal() * ed.vectors.transpose();
    worst_residual = std::max(worst_residual, (recon - a).cwiseAbs().maxCoeff());
  }
  return {worst_value < 1e-8 && worst_residual < 1e-8,
          fmt::format("200 matrices n<=6: max |lambda - oracle|={:.3g}, max reconstruction residual={:.3g} (tol 1e-8)",
                      worst_value, worst_residual)};
}

std::vector<CorrelationWindow> desk_windows(const ReturnPanel& panel, CorrelationMode mode) {
  WindowSpec spec = desk_preset().window;
  spec.mode = mode;
  return rolling_correlations(panel, spec);
}

// 5
Outcome correlation_invariants() {
  const auto panel = load_panel_csv((desk_run(1) / "returns.csv").string());
  std::size_t count = 0, bad = 0;
  double worst_trace = 0.0, min_eig = 1.0;
  for (auto mode : {CorrelationMode::Return, CorrelationMode::AbsoluteReturn}) {
    for (const auto& w : desk_windows(panel, mode)) {
      ++count;
      const auto chk = check_correlation(w.matrix);
      if (!chk.ok(w.size())) ++bad;
      const auto ed = eig_sym(w.matrix, w.window_end);
      worst_trace = std::max(worst_trace, std::fabs(ed.values.sum() - static_cast<double>(w.size())));
      min_eig = std::min(min_eig, ed.values.minCoeff());
    }
  }
  return {bad == 0 && worst_trace < 1e-8 && count > 0,
          fmt::format("{} windows (both modes): {} failing checks, max |sum(lambda) - N|={:.3g}, min lambda={:.4g}",
                      count, bad, worst_trace, min_eig)};
}

// 6
Outcome crf_contract() {
  const auto panel = load_panel_csv((desk_run(1) / "returns.csv").string());
  std::size_t count = 0, bad = 0;
  for (auto mode : {CorrelationMode::Return, CorrelationMode::AbsoluteReturn}) {
    for (const auto& w : desk_windows(panel, mode)) {
      ++count;
      const auto s = summarize(w, desk_preset().window.window, false);
      bool ok = s.crf.back() == 1.0;
      for (std::size_t m = 1; m < s.crf.size(); ++m) ok = ok && s.crf[m] >= s.crf[m - 1];
      if (!ok) ++bad;
    }
  }
  Eigen::MatrixXd two(2, 2);
  two << 1.0, 0.5, 0.5, 1.0;
  const auto ed = eig_sym(two);
  const double c1 = crf(std::span<const double>(ed.values.data(), 2), 1);
  const bool two_ok = c1 == 0.75;
  return {bad == 0 && count > 0 && two_ok,
          fmt::format("{} windows: {} violate monotonicity or CRF_N=1; 2x2 rho=0.5: CRF_1={:.17g}", count, bad, c1)};
}

// 7
Outcome null_spectrum() {
  const auto panel = load_panel_csv((desk_run(1) / "returns.csv").string());
  const auto shuffled = shuffle_time(panel, 4242);
  const auto windows = desk_windows(shuffled, CorrelationMode::Return);
  const std::size_t m = desk_preset().window.window;
  const std::size_t n = panel.assets();
  const auto mp = mp_reference(m, n);
  std::size_t inside = 0;
  double ipr_sum = 0.0;
  for (const auto& w : windows) {
    const auto s = summarize(w, m, false);
    const double l1 = s.eigenvalues(0);
    if (l1 >= mp.lambda_minus - 0.1 && l1 <= mp.lambda_plus + 0.3) ++inside;
    ipr_sum += s.ipr[0];
  }
  const double frac = static_cast<double>(inside) / static_cast<double>(windows.size());
  const double mean_ipr = ipr_sum / static_cast<double>(windows.size());
  const double target = 3.0 / static_cast<double>(n);
  const double rel = mean_ipr / target - 1.0;
  const bool l_ok = frac >= 0.95;
  const bool i_ok = std::fabs(rel) <= 0.15;
  return {l_ok && i_ok,
          fmt::format("{} windows: lambda_1 in [{:.4f}, {:.4f}] for {:.1f}% (>=95% {}), mean IPR(1)={:.4f} vs 3/N={:.4f} "
                      "({:+.1f}%, tol 15% {})",
                      windows.size(), mp.lambda_minus - 0.1, mp.lambda_plus + 0.3, 100 * frac, l_ok ? "ok" : "FAIL",
                      mean_ipr, target, 100 * rel, i_ok ? "ok" : "FAIL")};
}

// 8
Outcome volatility_coupling() {
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto dir = desk_run(seed);
    const auto vol = column(dir / "window_volatility.csv", "I_mean");
    const auto crf1 = column(dir / "crf_return.csv", "CRF1");
    const auto ipr1 = column(dir / "ipr_absolute-return.csv", "IPR1");
    const auto [lo, hi] = std::minmax_element(vol.begin(), vol.end());
    const double ratio = *hi / *lo;
    const double r_crf = spearman(vol, crf1);
    const double r_ipr = spearman(vol, ipr1);
    const bool separated = ratio > 2.0;
    detail += fmt::format("{}seed {}: I ratio={:.3f}{}, rank(I,CRF_1)={:+.3f}, rank(I,IPR_abs)={:+.3f}",
                          detail.empty() ? "" : "; ", seed, ratio, separated ? "" : " (no regime separation)", r_crf,
                          r_ipr);
    if (separated && r_crf > 0.0 && r_ipr > 0.0) return {true, detail};
  }
  return {false, detail};
}

// 9
Outcome determinism() {
  const std::size_t max_threads = ThreadPool::hardware_threads();
  std::vector<std::size_t> counts{1, 2};
  if (max_threads > 2) counts.push_back(max_threads);
  const std::vector<std::string> files{"returns.csv",       "acf.csv",          "tau.csv",
                                       "histogram.csv",     "volatility_index.csv", "moments.json",
                                       "crf_return.csv",    "crf_absolute-return.csv", "ipr_return.csv",
                                       "ipr_absolute-return.csv", "scatter_return.csv", "scatter_absolute-return.csv",
                                       "window_volatility.csv", "spectra_flags.json", "mp_reference.csv"};
  const auto ref = desk_run(1, counts.front());
  std::size_t mismatches = 0;
  std::string which;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    const auto other = desk_run(1, counts[i]);
    for (const auto& f : files) {
      if (slurp(ref / f) != slurp(other / f)) {
        ++mismatches;
        which += fmt::format(" {}@{}", f, counts[i]);
      }
    }
  }
  std::string threads;
  for (auto c : counts) threads += fmt::format("{}{}", threads.empty() ? "" : ",", c);
  return {mismatches == 0, fmt::format("threads {{{}}} (hardware {}): {} files compared, {} differ{}", threads,
                                       max_threads, files.size() * (counts.size() - 1), mismatches, which)};
}

// 10
Outcome synthetic_statistics() {
  const auto iid = oracle::gaussian_series(1000000, 5);
  const auto t_iid = integrated_autocorr_time(iid);
  const double kurt = distribution_stats(iid).kurtosis;
  const auto ar = oracle::ar1_series(1000000, 0.8, 6);
  const auto t_ar = integrated_autocorr_time(ar);
  const bool ok = std::fabs(t_iid.tau - 0.5) <= 0.1 && std::fabs(kurt - 3.0) <= 0.05 && std::fabs(t_ar.tau - 4.5) <= 0.5;
  return {ok, fmt::format("iid: tau={:.4f} (0.5+-0.1), kurtosis={:.4f} (3+-0.05); AR(1) 0.8: tau={:.4f} (4.5+-0.5)",
                          t_iid.tau, kurt, t_ar.tau)};
}

}  // namespace

int main(int argc, char** argv) {
  g_scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "isingmkt_acceptance";
  fs::create_directories(g_scratch);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"MP bounds", mp_bounds},
      {"RMT eigenvector baselines", rmt_baselines},
      {"desk stylized facts", stylized_facts},
      {"eigensolver vs oracle", eigensolver_oracle},
      {"correlation invariants", correlation_invariants},
      {"CRF contract", crf_contract},
      {"null-model spectrum", null_spectrum},
      {"volatility regime coupling", volatility_coupling},
      {"thread-count determinism", determinism},
      {"synthetic statistics", synthetic_statistics},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    fmt::print("[{}] {:>2} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
