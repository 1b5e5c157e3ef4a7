#include "isingmkt/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "isingmkt/csv.hpp"
#include "isingmkt/error.hpp"
#include "isingmkt/rng.hpp"
#include "json.hpp"

namespace isingmkt {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

CouplingMatrix::CouplingMatrix(std::size_t n) : entries_(Eigen::MatrixXd::Zero(idx(n), idx(n))) {}

CouplingMatrix::CouplingMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw DimensionMismatch("coupling matrix must be square");
  if (!entries_.allFinite()) throw InvalidArgument("coupling matrix has non-finite entries");
  for (Eigen::Index l = 0; l < entries_.rows(); ++l) {
    if (entries_(l, l) != 0.0) {
      throw InvalidArgument("coupling matrix diagonal entry " + std::to_string(l) + " is nonzero");
    }
  }
}

CouplingMatrix CouplingMatrix::unchecked(Eigen::MatrixXd entries) {
  CouplingMatrix m;
  m.entries_ = std::move(entries);
  return m;
}

void CouplingMatrix::set(std::size_t j, std::size_t k, double value) {
  if (j == k) throw InvalidArgument("coupling diagonal must stay zero");
  entries_(idx(j), idx(k)) = value;
}

CouplingMatrix CouplingMatrix::symmetrized() const {
  Eigen::MatrixXd s = 0.5 * (entries_ + entries_.transpose());
  return CouplingMatrix::unchecked(std::move(s));
}

void validate_spec(const CouplingSpec& spec) {
  if (spec.n < 1) throw InvalidArgument("coupling.n must be at least 1");
  if (!(spec.density >= 0.0 && spec.density <= 1.0)) {
    throw InvalidArgument("coupling.density must lie in [0, 1]");
  }
  if (!(spec.variance >= 0.0) || !std::isfinite(spec.variance)) {
    throw InvalidArgument("coupling.variance must be non-negative and finite");
  }
  if (!std::isfinite(spec.mean)) throw InvalidArgument("coupling.mean must be finite");
}

std::size_t target_nonzeros(const CouplingSpec& spec) {
  const double slots = static_cast<double>(spec.n) * static_cast<double>(spec.n - 1);
  return static_cast<std::size_t>(std::llround(spec.density * slots));
}

CouplingMatrix generate_coupling(const CouplingSpec& spec) {
  validate_spec(spec);
  const std::size_t n = spec.n;
  const std::size_t slots = n * (n - 1);
  const std::size_t picks = std::min(target_nonzeros(spec), slots);

  Engine eng = make_engine(spec.seed, streams::kCoupling);

  // Partial Fisher-Yates over the off-diagonal slots.
  std::vector<std::size_t> slot(slots);
  std::iota(slot.begin(), slot.end(), std::size_t{0});
  for (std::size_t i = 0; i < picks; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(eng, slots - i));
    std::swap(slot[i], slot[j]);
  }
  std::sort(slot.begin(), slot.begin() + static_cast<std::ptrdiff_t>(picks));

  const double sd = std::sqrt(spec.variance);
  std::normal_distribution<double> normal(spec.mean, sd > 0.0 ? sd : 1.0);
  auto draw = [&] {
    if (sd == 0.0) return spec.mean;
    double v = 0.0;
    do {
      v = normal(eng);
    } while (v == 0.0);
    return v;
  };

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(idx(n), idx(n));
  for (std::size_t p = 0; p < picks; ++p) {
    const std::size_t row = slot[p] / (n - 1);
    const std::size_t r = slot[p] % (n - 1);
    const std::size_t col = r < row ? r : r + 1;
    g(idx(row), idx(col)) = draw();
  }
  CouplingMatrix gamma(std::move(g));
  return spec.symmetrize ? gamma.symmetrized() : gamma;
}

CouplingDiagnostics validate_coupling(const CouplingMatrix& gamma) {
  CouplingDiagnostics d;
  const auto& g = gamma.entries();
  d.n = static_cast<std::size_t>(g.rows());
  if (g.rows() != g.cols()) {
    d.diagonal_zero = false;
    d.symmetric = false;
    return d;
  }
  double sum = 0.0;
  bool first = true;
  for (Eigen::Index j = 0; j < g.rows(); ++j) {
    if (g(j, j) != 0.0) d.diagonal_zero = false;
    for (Eigen::Index k = 0; k < g.cols(); ++k) {
      if (g(j, k) != g(k, j)) d.symmetric = false;
      if (j == k || g(j, k) == 0.0) continue;
      const double v = g(j, k);
      ++d.nonzeros;
      sum += v;
      if (first || v < d.min_nonzero) d.min_nonzero = v;
      if (first || v > d.max_nonzero) d.max_nonzero = v;
      first = false;
    }
  }
  if (d.nonzeros > 0) d.mean_nonzero = sum / static_cast<double>(d.nonzeros);
  return d;
}

std::string diagnostics_json(const CouplingDiagnostics& d) {
  nlohmann::ordered_json j;
  j["n"] = d.n;
  j["nonzeros"] = d.nonzeros;
  j["min_nonzero"] = d.min_nonzero;
  j["max_nonzero"] = d.max_nonzero;
  j["mean_nonzero"] = d.mean_nonzero;
  j["diagonal_zero"] = d.diagonal_zero;
  j["symmetric"] = d.symmetric;
  j["ok"] = d.ok();
  return j.dump(2) + "\n";
}

void write_coupling_dense(std::ostream& out, const CouplingMatrix& gamma) {
  const auto& g = gamma.entries();
  out << "n," << g.rows() << '\n';
  for (Eigen::Index j = 0; j < g.rows(); ++j) {
    for (Eigen::Index k = 0; k < g.cols(); ++k) {
      if (k) out << ',';
      out << csv::format_double(g(j, k));
    }
    out << '\n';
  }
}

CouplingMatrix read_coupling_dense(std::istream& in) {
  std::string line;
  if (!csv::read_line(in, line)) throw ParseError("empty coupling file");
  const auto head = csv::split(line);
  if (head.size() != 2 || head[0] != "n") throw ParseError("dense coupling header must be 'n,<N>'");
  const long long n = csv::parse_int(head[1]);
  if (n < 1) throw ParseError("coupling size must be positive");
  Eigen::MatrixXd g(n, n);
  for (long long j = 0; j < n; ++j) {
    if (!csv::read_line(in, line)) throw ParseError("dense coupling file truncated");
    const auto fields = csv::split(line);
    if (static_cast<long long>(fields.size()) != n) {
      throw ParseError("dense coupling row " + std::to_string(j) + " has wrong length");
    }
    for (long long k = 0; k < n; ++k) g(j, k) = csv::parse_double(fields[static_cast<std::size_t>(k)]);
  }
  return CouplingMatrix(std::move(g));
}

void write_coupling_sparse(std::ostream& out, const CouplingMatrix& gamma) {
  const auto& g = gamma.entries();
  out << "n=" << g.rows() << '\n';
  for (Eigen::Index j = 0; j < g.rows(); ++j) {
    for (Eigen::Index k = 0; k < g.cols(); ++k) {
      if (g(j, k) != 0.0) out << j << ',' << k << ',' << csv::format_double(g(j, k)) << '\n';
    }
  }
}

CouplingMatrix read_coupling_sparse(std::istream& in) {
  std::string line;
  if (!csv::read_line(in, line) || line.rfind("n=", 0) != 0) {
    throw ParseError("sparse coupling header must be 'n=<N>'");
  }
  const long long n = csv::parse_int(std::string_view(line).substr(2));
  if (n < 1) throw ParseError("coupling size must be positive");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  std::size_t lineno = 1;
  while (csv::read_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 3) throw ParseError("sparse coupling line " + std::to_string(lineno) + " malformed");
    const long long j = csv::parse_int(f[0]);
    const long long k = csv::parse_int(f[1]);
    if (j < 0 || k < 0 || j >= n || k >= n) {
      throw ParseError("sparse coupling index out of range on line " + std::to_string(lineno));
    }
    g(j, k) = csv::parse_double(f[2]);
  }
  return CouplingMatrix(std::move(g));
}

CouplingMatrix load_coupling(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  if (in.peek() == 'n') {
    std::string first;
    std::getline(in, first);
    in.seekg(0);
    if (first.rfind("n=", 0) == 0) return read_coupling_sparse(in);
  }
  return read_coupling_dense(in);
}

void save_coupling_dense(const std::string& path, const CouplingMatrix& gamma) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_coupling_dense(out, gamma);
}

void save_coupling_sparse(const std::string& path, const CouplingMatrix& gamma) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_coupling_sparse(out, gamma);
}

}  // namespace isingmkt
