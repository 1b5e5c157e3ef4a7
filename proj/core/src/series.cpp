#include "isingmkt/series.hpp"

#include <cmath>
#include <string>

#include "isingmkt/error.hpp"
#include "isingmkt/rng.hpp"

namespace isingmkt {

namespace {

struct MeanVar {
  double mean;
  double var;
};

// Exact constancy; a float variance of a constant series need not be 0.
bool constant(std::span<const double> x) {
  for (double v : x) {
    if (v != x.front()) return false;
  }
  return true;
}

// Two-pass mean and population variance.
MeanVar mean_var(std::span<const double> x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  return {mean, var};
}

}  // namespace

ReturnPanel normalize_returns(const ReturnPanel& panel) {
  if (panel.steps() == 0) throw InvalidArgument("cannot normalize an empty panel");
  ReturnPanel out(panel.assets(), panel.steps());
  for (std::size_t k = 0; k < panel.assets(); ++k) {
    const auto src = panel.row(k);
    const auto [mean, var] = mean_var(src);
    if (constant(src) || !(var > 0.0)) {
      throw DegenerateSeries(k, "asset " + std::to_string(k) + " has zero variance");
    }
    const double sd = std::sqrt(var);
    auto dst = out.row(k);
    for (std::size_t t = 0; t < src.size(); ++t) dst[t] = (src[t] - mean) / sd;
  }
  return out;
}

std::vector<double> Histogram::density() const {
  std::vector<double> d(counts.size(), 0.0);
  if (total == 0) return d;
  const double norm = static_cast<double>(total) * width;
  for (std::size_t i = 0; i < counts.size(); ++i) d[i] = static_cast<double>(counts[i]) / norm;
  return d;
}

Histogram histogram(std::span<const double> values, const HistogramSpec& spec) {
  if (spec.bins == 0 || !(spec.hi > spec.lo)) throw InvalidArgument("invalid histogram spec");
  Histogram h;
  h.width = (spec.hi - spec.lo) / static_cast<double>(spec.bins);
  h.counts.assign(spec.bins, 0);
  h.centers.resize(spec.bins);
  for (std::size_t b = 0; b < spec.bins; ++b) {
    h.centers[b] = spec.lo + (static_cast<double>(b) + 0.5) * h.width;
  }
  for (double v : values) {
    ++h.total;
    if (v < spec.lo) {
      ++h.underflow;
    } else if (v >= spec.hi) {
      ++h.overflow;
    } else {
      auto b = static_cast<std::size_t>((v - spec.lo) / h.width);
      if (b >= spec.bins) b = spec.bins - 1;
      ++h.counts[b];
    }
  }
  return h;
}

DistributionStats distribution_stats(std::span<const double> values, const HistogramSpec& spec) {
  if (values.empty()) throw InvalidArgument("distribution_stats on empty input");
  DistributionStats s;
  s.count = values.size();
  const auto [mean, var] = mean_var(values);
  s.mean = mean;
  s.variance = constant(values) ? 0.0 : var;
  if (s.variance > 0.0) {
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : values) {
      const double d = v - mean;
      const double d2 = d * d;
      m3 += d2 * d;
      m4 += d2 * d2;
    }
    const double n = static_cast<double>(values.size());
    s.skewness = (m3 / n) / std::pow(var, 1.5);
    s.kurtosis = (m4 / n) / (var * var);
  }
  s.hist = histogram(values, spec);
  return s;
}

std::vector<DistributionStats> distribution_stats(const ReturnPanel& panel, bool pooled,
                                                  const HistogramSpec& spec) {
  if (panel.empty()) throw InvalidArgument("distribution_stats on empty panel");
  std::vector<DistributionStats> out;
  if (pooled) {
    const auto& v = panel.values();
    out.push_back(distribution_stats(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), spec));
  } else {
    for (std::size_t k = 0; k < panel.assets(); ++k) out.push_back(distribution_stats(panel.row(k), spec));
  }
  return out;
}

AcfCurve acf(std::span<const double> x, std::size_t max_lag) {
  if (max_lag < 1 || max_lag >= x.size()) {
    throw InvalidArgument("acf requires 1 <= max_lag < series length");
  }
  const auto [mean, var] = mean_var(x);
  if (constant(x) || !(var > 0.0)) throw DegenerateSeries(0, "acf of a zero-variance series");

  std::vector<double> d(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) d[t] = x[t] - mean;
  double c0 = 0.0;
  for (double v : d) c0 += v * v;

  AcfCurve out;
  out.rho.resize(max_lag + 1);
  out.rho[0] = 1.0;
  for (std::size_t l = 1; l <= max_lag; ++l) {
    double c = 0.0;
    for (std::size_t t = 0; t + l < d.size(); ++t) c += d[t] * d[t + l];
    out.rho[l] = c / c0;
  }
  out.noise_band = 1.96 / std::sqrt(static_cast<double>(x.size()));
  return out;
}

AcfCurve mean_acf(const ReturnPanel& panel, std::size_t max_lag) {
  AcfCurve out;
  out.rho.assign(max_lag + 1, 0.0);
  std::size_t used = 0;
  for (std::size_t k = 0; k < panel.assets(); ++k) {
    AcfCurve a;
    try {
      a = acf(panel.row(k), max_lag);
    } catch (const DegenerateSeries&) {
      continue;
    }
    for (std::size_t l = 0; l <= max_lag; ++l) out.rho[l] += a.rho[l];
    ++used;
  }
  if (used == 0) throw DegenerateSeries(0, "every asset has zero variance");
  for (double& r : out.rho) r /= static_cast<double>(used);
  out.rho[0] = 1.0;
  out.noise_band = 1.96 / std::sqrt(static_cast<double>(panel.steps()));
  return out;
}

AutocorrTime integrated_autocorr_time(std::span<const double> x, double c) {
  if (x.size() < 2) throw InvalidArgument("integrated_autocorr_time needs at least two samples");
  if (!(c > 0.0)) throw InvalidArgument("window constant c must be positive");
  const auto [mean, var] = mean_var(x);
  if (constant(x) || !(var > 0.0)) {
    throw DegenerateSeries(0, "autocorrelation time of a zero-variance series");
  }

  std::vector<double> d(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) d[t] = x[t] - mean;
  const double c0 = var * static_cast<double>(x.size());

  const std::size_t limit = x.size() / 2;
  double tau = 0.5;
  for (std::size_t w = 1; w < limit; ++w) {
    double cw = 0.0;
    for (std::size_t t = 0; t + w < d.size(); ++t) cw += d[t] * d[t + w];
    tau += cw / c0;
    if (static_cast<double>(w) >= c * tau) {
      AutocorrTime out;
      out.tau = tau;
      out.window = w;
      out.error = std::sqrt((4.0 * static_cast<double>(w) + 2.0) / static_cast<double>(x.size())) * tau;
      return out;
    }
  }
  throw WindowSearchFailure("no self-consistent window below T/2 = " + std::to_string(limit));
}

std::vector<double> volatility_index(const ReturnPanel& panel) {
  std::vector<double> idx(panel.steps(), 0.0);
  if (panel.assets() == 0) return idx;
  for (std::size_t k = 0; k < panel.assets(); ++k) {
    const auto r = panel.row(k);
    for (std::size_t t = 0; t < r.size(); ++t) idx[t] += std::fabs(r[t]);
  }
  for (double& v : idx) v /= static_cast<double>(panel.assets());
  return idx;
}

ReturnPanel shuffle_time(const ReturnPanel& panel, std::uint64_t seed) {
  ReturnPanel out = panel;
  for (std::size_t k = 0; k < out.assets(); ++k) {
    Engine eng = make_engine(derive_seed(seed, streams::kShuffle), k);
    auto r = out.row(k);
    for (std::size_t i = r.size(); i > 1; --i) {
      std::swap(r[i - 1], r[uniform_index(eng, i)]);
    }
  }
  return out;
}

}  // namespace isingmkt
