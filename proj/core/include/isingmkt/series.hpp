#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "isingmkt/panel.hpp"

namespace isingmkt {

/// Subtracts each row's mean and divides by its population standard
/// deviation (divisor T). Throws DegenerateSeries naming the first
/// zero-variance asset.
ReturnPanel normalize_returns(const ReturnPanel& panel);

/// Symmetric linear binning with underflow/overflow counters.
struct HistogramSpec {
  std::size_t bins = 81;
  double lo = -10.0;
  double hi = 10.0;
};

struct Histogram {
  std::vector<double> centers;
  std::vector<std::size_t> counts;
  std::size_t underflow = 0;
  std::size_t overflow = 0;
  std::size_t total = 0;  // includes under/overflow
  double width = 0.0;

  /// counts / (total * width): integrates to the in-range fraction.
  std::vector<double> density() const;
};

Histogram histogram(std::span<const double> values, const HistogramSpec& spec = {});

/// Moments of a sample. Kurtosis is the raw fourth standardized moment
/// (3 for a Gaussian), not the excess.
struct DistributionStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  Histogram hist;
};

/// Throws InvalidArgument on empty input.
DistributionStats distribution_stats(std::span<const double> values, const HistogramSpec& spec = {});

/// Pooled: one entry over all assets concatenated. Otherwise one per asset.
std::vector<DistributionStats> distribution_stats(const ReturnPanel& panel, bool pooled,
                                                  const HistogramSpec& spec = {});

/// Autocorrelation estimate with lag-0 normalization.
struct AcfCurve {
  std::vector<double> rho;  // rho[0] == 1
  double noise_band = 0.0;  // 1.96 / sqrt(T)

  std::size_t max_lag() const noexcept { return rho.empty() ? 0 : rho.size() - 1; }
};

/// rho[l] = sum_t (x_t - mean)(x_{t+l} - mean) / sum_t (x_t - mean)^2.
/// Throws InvalidArgument unless 1 <= max_lag < size, DegenerateSeries on
/// zero variance.
AcfCurve acf(std::span<const double> series, std::size_t max_lag);

/// Cross-asset average of per-asset ACFs, skipping zero-variance assets.
/// Throws DegenerateSeries when every asset is degenerate.
AcfCurve mean_acf(const ReturnPanel& panel, std::size_t max_lag);

struct AutocorrTime {
  double tau = 0.0;
  double error = 0.0;
  std::size_t window = 0;
};

/// Integrated autocorrelation time 1/2 + sum_{l=1..W} rho[l] with the
/// smallest W such that W >= c * tau(W). Error is sqrt((4W + 2) / T) * tau.
/// Throws WindowSearchFailure if no W below T/2 qualifies.
AutocorrTime integrated_autocorr_time(std::span<const double> series, double c = 5.0);

/// I(t) = (1/N) sum_k |R_k(t)|.
std::vector<double> volatility_index(const ReturnPanel& panel);

/// Independently permutes each asset's series in time. Destroys every
/// cross-asset and temporal correlation while keeping the marginals.
ReturnPanel shuffle_time(const ReturnPanel& panel, std::uint64_t seed);

}  // namespace isingmkt
