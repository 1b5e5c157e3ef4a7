#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "isingmkt/error.hpp"
#include "isingmkt/thread_pool.hpp"
#include "isingmkt/xcorr.hpp"
#include "json.hpp"
#include "oracles/synthetic.hpp"

using namespace isingmkt;

TEST(Xcorr, IdenticalAndOppositeAssets) {
  auto p = oracle::gaussian_panel(3, 400, 1);
  p.values().row(1) = p.values().row(0);
  p.values().row(2) = -p.values().row(0);
  const auto w = rolling_correlations(p, {});
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NEAR(w[0].matrix(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(w[0].matrix(0, 2), -1.0, 1e-12);
  EXPECT_EQ(w[0].window_end, 400);
}

TEST(Xcorr, IndependentSeriesAreWeaklyCorrelated) {
  // 3/sqrt(400) three-sigma bound, expected to hold for ~99.7% of pairs.
  const auto p = oracle::gaussian_panel(60, 400, 2);
  const auto w = rolling_correlations(p, {});
  std::size_t inside = 0;
  std::size_t pairs = 0;
  for (Eigen::Index j = 0; j < 60; ++j) {
    for (Eigen::Index k = j + 1; k < 60; ++k) {
      ++pairs;
      inside += std::fabs(w[0].matrix(j, k)) < 0.15;
    }
  }
  EXPECT_GE(static_cast<double>(inside) / pairs, 0.99);
}

TEST(Xcorr, WindowCountAndStamps) {
  const auto p = oracle::gaussian_panel(4, 1037, 3);
  for (std::size_t m : {1u, 50u, 400u, 1037u}) {
    for (std::size_t stride : {1u, 7u, 400u}) {
      WindowSpec spec;
      spec.window = m;
      spec.stride = stride;
      const std::size_t expect = (1037 - m) / stride + 1;
      EXPECT_EQ(window_count(1037, spec), expect);
      if (m == 1) continue;  // single-sample windows are all degenerate
      const auto w = rolling_correlations(p, spec);
      ASSERT_EQ(w.size(), expect);
      for (std::size_t i = 0; i < w.size(); ++i) {
        EXPECT_EQ(w[i].window_end, static_cast<long>(m + i * stride));
      }
    }
  }
}

TEST(Xcorr, WindowEqualsSeriesLengthGivesOneWindow) {
  const auto p = oracle::gaussian_panel(4, 200, 4);
  WindowSpec spec;
  spec.window = 200;
  EXPECT_EQ(rolling_correlations(p, spec).size(), 1u);
  spec.window = 201;
  EXPECT_THROW(rolling_correlations(p, spec), InvalidArgument);
  spec.window = 10;
  spec.stride = 0;
  EXPECT_THROW(rolling_correlations(p, spec), InvalidArgument);
}

TEST(Xcorr, InvariantsHoldInBothModes) {
  auto p = oracle::gaussian_panel(12, 900, 5);
  // Add a common factor so matrices are not near identity.
  const auto f = oracle::gaussian_series(900, 6);
  for (std::size_t k = 0; k < 12; ++k)
    for (std::size_t t = 0; t < 900; ++t) p(k, t) += 0.7 * f[t];
  for (auto mode : {CorrelationMode::Return, CorrelationMode::AbsoluteReturn}) {
    WindowSpec spec;
    spec.window = 100;
    spec.stride = 37;
    spec.mode = mode;
    for (const auto& w : rolling_correlations(p, spec)) {
      const auto chk = check_correlation(w.matrix);
      EXPECT_TRUE(chk.ok(12)) << to_string(mode) << " window " << w.window_end
                              << " asym=" << chk.max_asymmetry << " diag=" << chk.max_diagonal_error
                              << " max=" << chk.max_abs_entry << " min_eig=" << chk.min_eigenvalue;
      EXPECT_EQ(w.matrix, w.matrix.transpose());
    }
  }
}

TEST(Xcorr, AbsoluteModeUsesMagnitudes) {
  auto p = oracle::gaussian_panel(2, 400, 7);
  // Asset 1 = -|asset 0|: return correlation is partial, magnitude correlation is -1.
  for (std::size_t t = 0; t < 400; ++t) p(1, t) = -std::fabs(p(0, t));
  WindowSpec spec;
  spec.mode = CorrelationMode::AbsoluteReturn;
  EXPECT_NEAR(rolling_correlations(p, spec)[0].matrix(0, 1), 1.0, 1e-12);
}

TEST(Xcorr, PermutationEquivariance) {
  const auto p = oracle::gaussian_panel(6, 300, 8);
  const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  ReturnPanel q(6, 300);
  for (std::size_t k = 0; k < 6; ++k) q.values().row(static_cast<Eigen::Index>(k)) = p.values().row(static_cast<Eigen::Index>(perm[k]));
  WindowSpec spec;
  spec.window = 100;
  spec.stride = 50;
  const auto a = rolling_correlations(p, spec);
  const auto b = rolling_correlations(q, spec);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t w = 0; w < a.size(); ++w)
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t k = 0; k < 6; ++k)
        EXPECT_NEAR(b[w].matrix(j, k), a[w].matrix(perm[j], perm[k]), 1e-14);
}

TEST(Xcorr, DegenerateWindowIsFlaggedAndContinues) {
  auto p = oracle::gaussian_panel(3, 200, 9);
  for (std::size_t t = 100; t < 200; ++t) p(1, t) = 0.25;  // frozen in the second window
  WindowSpec spec;
  spec.window = 100;
  spec.stride = 100;
  const auto w = rolling_correlations(p, spec);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_FALSE(w[0].degenerate());
  ASSERT_TRUE(w[1].degenerate());
  EXPECT_EQ(w[1].degenerate_assets, std::vector<std::size_t>{1});
  EXPECT_EQ(w[1].matrix(1, 1), 1.0);
  EXPECT_EQ(w[1].matrix(0, 1), 0.0);
  EXPECT_EQ(w[1].matrix(1, 2), 0.0);
  EXPECT_TRUE(check_correlation(w[1].matrix).ok(3));
}

TEST(Xcorr, GlobalNormalizationMatchesLiteralAverage) {
  const auto p = oracle::gaussian_panel(3, 300, 10);
  WindowSpec spec;
  spec.window = 100;
  spec.stride = 100;
  spec.normalization = Normalization::Global;
  const auto w = rolling_correlations(p, spec);

  // Direct evaluation of (1/M) sum m_k m_j with full-series moments.
  std::vector<double> mean(3, 0.0);
  std::vector<double> sd(3, 0.0);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t t = 0; t < 300; ++t) mean[k] += p(k, t);
    mean[k] /= 300;
    for (std::size_t t = 0; t < 300; ++t) sd[k] += (p(k, t) - mean[k]) * (p(k, t) - mean[k]);
    sd[k] = std::sqrt(sd[k] / 300);
  }
  for (const auto& win : w) {
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t k = 0; k < 3; ++k) {
        double c = 0.0;
        for (long t = win.window_end - 100; t < win.window_end; ++t)
          c += (p(j, t) - mean[j]) / sd[j] * (p(k, t) - mean[k]) / sd[k];
        EXPECT_NEAR(win.matrix(j, k), c / 100, 1e-12);
      }
    }
  }
}

TEST(Xcorr, ParallelMatchesSerial) {
  const auto p = oracle::gaussian_panel(8, 1000, 11);
  WindowSpec spec;
  spec.window = 100;
  spec.stride = 25;
  const auto a = rolling_correlations(p, spec);
  ThreadPool pool(3);
  const auto b = rolling_correlations(p, spec, &pool);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].matrix, b[i].matrix);
}

TEST(Xcorr, PersistMatricesAndManifest) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "isingmkt_xcorr_test";
  fs::remove_all(dir);
  const auto p = oracle::gaussian_panel(4, 300, 12);
  WindowSpec spec;
  spec.window = 100;
  spec.stride = 100;
  spec.mode = CorrelationMode::AbsoluteReturn;
  const auto w = rolling_correlations(p, spec);
  const auto files = save_correlations(dir.string(), w, spec);
  ASSERT_EQ(files.size(), 4u);
  EXPECT_EQ(load_correlation_csv((dir / "C_200.csv").string()), w[1].matrix);

  std::ifstream in(dir / "manifest.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["mode"], "absolute-return");
  EXPECT_EQ(j["windows"].size(), 3u);
  EXPECT_EQ(j["windows"][2]["window_end"], 300);
  EXPECT_EQ(j["windows"][0]["degenerate"], false);
  fs::remove_all(dir);
}

TEST(Xcorr, ModeParsing) {
  EXPECT_EQ(parse_mode("return"), CorrelationMode::Return);
  EXPECT_EQ(parse_mode("absolute-return"), CorrelationMode::AbsoluteReturn);
  EXPECT_THROW(parse_mode("squared"), InvalidArgument);
  EXPECT_EQ(parse_normalization("global"), Normalization::Global);
}
