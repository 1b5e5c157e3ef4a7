#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "isingmkt/coupling.hpp"
#include "isingmkt/lattice.hpp"
#include "isingmkt/panel.hpp"
#include "isingmkt/rng.hpp"

namespace isingmkt {

class ThreadPool;

/// Parameters of the coupled multi-asset spin market. Defaults are the
/// full-scale setup: 300 assets on 100 x 100 lattices.
struct ModelParams {
  std::size_t L = 100;
  std::size_t N = 300;
  double J = 1.0;
  double alpha = 60.0;
  double beta = 2.3;
  std::size_t therm_sweeps = 5000;
  std::size_t collect_sweeps = 30000;
  std::uint64_t master_seed = 0;

  std::size_t sites() const noexcept { return L * L; }
};

/// Throws InvalidArgument on L < 2, N < 1, beta <= 0 or collect_sweeps < 1.
void validate_params(const ModelParams& params);

/// One independent engine per asset, seeded from (master_seed, asset).
/// Each asset only ever draws from its own engine, which makes the
/// simulation independent of how assets are scheduled onto threads.
struct RngPlan {
  RngPlan(std::uint64_t master_seed, std::size_t assets);

  std::uint64_t master_seed;
  std::vector<Engine> engines;
};

/// Lattices plus the magnetizations frozen at the start of the current sweep.
struct MarketState {
  MarketState(std::size_t side, std::size_t assets, std::int8_t fill = 1);

  std::vector<SpinLattice> lattices;
  std::vector<double> mag_snapshot;
  std::size_t t = 0;

  // Workspace reused across sweeps.
  std::vector<std::uint32_t> neighbor_table;
  std::vector<std::vector<std::uint32_t>> visit_order;

  std::size_t assets() const noexcept { return lattices.size(); }

  /// Recomputes mag_snapshot from the lattices.
  void refresh_snapshot();
};

/// Closed-form local field from its parts. `own_mag` is the asset's own
/// magnetization and `cross` the precomputed sum over gamma(j, k) * M_j.
inline double field_value(double J, int neighbor_sum, double alpha, int spin, double own_mag,
                          double cross) noexcept {
  return J * neighbor_sum - alpha * spin * std::fabs(own_mag) + cross;
}

/// Probability that the updated spin is +1: 1 / (1 + exp(-2 beta h)).
/// Evaluated without overflow for any finite h.
inline double flip_probability(double h, double beta) noexcept {
  const double x = 2.0 * beta * h;
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// sum_j gamma(j, k) * mags[j], accumulated in index order.
double cross_field(const CouplingMatrix& gamma, std::span<const double> mags, std::size_t k);

/// Local field of site i of asset k.
///
/// The neighbor term and the minority term read lattice k as it is now
/// (mid-sweep values included). The cross-asset term uses the
/// sweep-start snapshot. Throws std::out_of_range on a bad index.
double local_field(std::size_t k, std::size_t i, const MarketState& state,
                   const CouplingMatrix& gamma, const ModelParams& params);

/// Advances every lattice by one sweep and returns R_k = (M'_k - M_k) / 2.
///
/// Each lattice visits all of its sites once in a fresh random order
/// drawn from its own engine. Assets may run concurrently on `pool`;
/// the result does not depend on the pool size.
std::vector<double> sweep(MarketState& state, const CouplingMatrix& gamma,
                          const ModelParams& params, RngPlan& rng, ThreadPool* pool = nullptr);

/// Called after every sweep with the sweep index (thermalization included)
/// and the updated state.
using SweepObserver = std::function<void(std::size_t sweep_index, const MarketState&)>;

/// Ordered start (all +1), therm_sweeps discarded sweeps, then
/// collect_sweeps recorded sweeps. Returns an N x collect_sweeps panel.
ReturnPanel run_simulation(const ModelParams& params, const CouplingMatrix& gamma,
                           ThreadPool* pool = nullptr, const SweepObserver& observer = {});

}  // namespace isingmkt
