#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace isingmkt {

/// Cross-asset interaction matrix gamma. Entry (j, k) is the weight with
/// which asset j's magnetization enters asset k's local field. Not
/// necessarily symmetric; the diagonal must be zero.
class CouplingMatrix {
public:
  CouplingMatrix() = default;
  /// n x n zero matrix.
  explicit CouplingMatrix(std::size_t n);
  /// Throws DimensionMismatch for non-square input and InvalidArgument for
  /// a nonzero diagonal or non-finite entries.
  explicit CouplingMatrix(Eigen::MatrixXd entries);

  std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t j, std::size_t k) const { return entries_(j, k); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }

  /// Sets an off-diagonal entry. Throws InvalidArgument when j == k.
  void set(std::size_t j, std::size_t k, double value);

  /// (gamma + gamma^T) / 2.
  CouplingMatrix symmetrized() const;

  friend bool operator==(const CouplingMatrix& a, const CouplingMatrix& b) {
    return a.entries_.rows() == b.entries_.rows() && a.entries_ == b.entries_;
  }

  /// Builds a matrix without checking invariants; validate_coupling() can
  /// then report what is wrong with it.
  static CouplingMatrix unchecked(Eigen::MatrixXd entries);

private:
  Eigen::MatrixXd entries_;
};

/// Parameters of the random sparse Gaussian coupling ensemble.
struct CouplingSpec {
  std::size_t n = 300;
  double density = 0.10;   // fraction of off-diagonal entries that are nonzero
  double mean = 0.05;
  double variance = 0.01;  // a variance, not a standard deviation
  std::uint64_t seed = 0;
  bool symmetrize = false;
};

/// Throws InvalidArgument unless n >= 1, 0 <= density <= 1, variance >= 0.
void validate_spec(const CouplingSpec& spec);

/// Number of nonzero off-diagonal entries the spec asks for:
/// round(density * n * (n - 1)).
std::size_t target_nonzeros(const CouplingSpec& spec);

/// Picks target_nonzeros(spec) off-diagonal positions uniformly without
/// replacement and fills each with an independent Normal(mean, variance)
/// draw. Deterministic in spec.seed.
CouplingMatrix generate_coupling(const CouplingSpec& spec);

struct CouplingDiagnostics {
  std::size_t n = 0;
  std::size_t nonzeros = 0;  // off-diagonal only
  double min_nonzero = 0.0;
  double max_nonzero = 0.0;
  double mean_nonzero = 0.0;
  bool diagonal_zero = true;
  bool symmetric = true;

  bool ok() const noexcept { return diagonal_zero; }
};

/// Never throws on a bad matrix; a nonzero diagonal is reported through
/// diagonal_zero.
CouplingDiagnostics validate_coupling(const CouplingMatrix& gamma);

std::string diagnostics_json(const CouplingDiagnostics& d);

/// Dense CSV: header `n,<N>` followed by N rows of N comma-separated values.
void write_coupling_dense(std::ostream& out, const CouplingMatrix& gamma);
CouplingMatrix read_coupling_dense(std::istream& in);

/// Sparse text: header `n=<N>` followed by `j,k,value` lines, row-major.
void write_coupling_sparse(std::ostream& out, const CouplingMatrix& gamma);
CouplingMatrix read_coupling_sparse(std::istream& in);

/// Dispatches on content: a first line starting with `n=` is sparse.
CouplingMatrix load_coupling(const std::string& path);
void save_coupling_dense(const std::string& path, const CouplingMatrix& gamma);
void save_coupling_sparse(const std::string& path, const CouplingMatrix& gamma);

}  // namespace isingmkt
