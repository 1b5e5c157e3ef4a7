#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "isingmkt/xcorr.hpp"

namespace isingmkt {

class ThreadPool;

/// Eigenpairs sorted by descending eigenvalue; column l of `vectors`
/// belongs to values[l]. Each vector's largest-magnitude component is
/// positive (first such index on ties).
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Full symmetric eigendecomposition. Throws EigenFailure (carrying
/// window_end) for non-square input, asymmetry above 1e-9, non-finite
/// entries, or solver non-convergence.
EigenDecomposition eig_sym(const Eigen::MatrixXd& matrix, long window_end = -1);

/// (sum of the first m eigenvalues) / (sum of all). Eigenvalues must be
/// sorted descending. Throws InvalidArgument unless 1 <= m <= N.
double crf(std::span<const double> eigenvalues, std::size_t m);

/// CRF_1 .. CRF_N.
std::vector<double> crf_curve(std::span<const double> eigenvalues);

/// Limiting eigenvalue law of a T x N random correlation matrix, Q = T/N.
struct MpReference {
  double q = 0.0;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;

  /// Zero outside [lambda_minus, lambda_plus].
  double density(double lambda) const noexcept;

  /// `points` evenly spaced (lambda, rho) pairs from edge to edge.
  std::vector<std::pair<double, double>> sample(std::size_t points = 512) const;
};

/// Throws InvalidArgument unless t_window / n_assets > 1.
MpReference mp_reference(std::size_t t_window, std::size_t n_assets);

/// Sum of v_j^4 and v_j^6. Throws InvalidArgument if |‖v‖ - 1| > 1e-6.
double ipr(std::span<const double> v);
double ipr6(std::span<const double> v);

struct SpectralSummary {
  long window_end = 0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // empty unless kept
  std::vector<double> crf;       // CRF_1 .. CRF_N
  std::vector<double> ipr;       // per eigenvector
  std::vector<double> ipr6;
  /// Eigenvalue l is within 1e-10 of a neighbor; its eigenvector (and so
  /// its IPR) depends on the solver's choice of basis.
  std::vector<bool> non_unique;
  std::optional<MpReference> mp;
  bool degenerate_window = false;
};

/// Spectrum-derived quantities of one correlation matrix.
SpectralSummary summarize(const CorrelationWindow& window, std::size_t t_window,
                          bool keep_vectors = true);

struct TrajectoryFailure {
  long window_end = 0;
  std::string message;
};

struct SpectralTrajectory {
  std::vector<SpectralSummary> windows;
  std::vector<TrajectoryFailure> failures;
  std::size_t top_m = 5;
};

/// Summarizes every window. A failing decomposition is recorded in
/// `failures` and the batch continues. Throws DimensionMismatch when the
/// windows disagree on N.
SpectralTrajectory spectral_trajectory(const std::vector<CorrelationWindow>& windows, std::size_t top_m,
                                       std::size_t t_window, ThreadPool* pool = nullptr,
                                       bool keep_vectors = false);

/// `window_end,CRF1..CRF<top_m>`
void save_crf_csv(const std::string& path, const SpectralTrajectory& traj);
/// `window_end,IPR1,IPR6_1`
void save_ipr_csv(const std::string& path, const SpectralTrajectory& traj);
/// `window_end,l,lambda,ipr` for l = 1..top_m
void save_scatter_csv(const std::string& path, const SpectralTrajectory& traj);
/// `lambda,rho`
void save_mp_csv(const std::string& path, const MpReference& ref, std::size_t points = 512);

}  // namespace isingmkt
