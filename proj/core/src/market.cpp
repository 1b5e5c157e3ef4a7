#include "isingmkt/market.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "isingmkt/error.hpp"
#include "isingmkt/thread_pool.hpp"

namespace isingmkt {

void validate_params(const ModelParams& p) {
  if (p.L < 2) throw InvalidArgument("model.L must be at least 2");
  if (p.N < 1) throw InvalidArgument("model.N must be at least 1");
  if (!(p.beta > 0.0) || !std::isfinite(p.beta)) {
    throw InvalidArgument("model.beta must be positive and finite");
  }
  if (!std::isfinite(p.alpha) || !std::isfinite(p.J)) {
    throw InvalidArgument("model.alpha and model.J must be finite");
  }
  if (p.collect_sweeps < 1) throw InvalidArgument("model.collect_sweeps must be at least 1");
  if (p.sites() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("model.L is too large");
  }
}

RngPlan::RngPlan(std::uint64_t seed, std::size_t assets) : master_seed(seed) {
  engines.reserve(assets);
  for (std::size_t k = 0; k < assets; ++k) {
    engines.push_back(make_engine(seed, streams::kAssetBase + k));
  }
}

MarketState::MarketState(std::size_t side, std::size_t assets, std::int8_t fill)
    : lattices(assets, SpinLattice(side, fill)),
      mag_snapshot(assets, 0.0),
      neighbor_table(torus_neighbor_table(side)),
      visit_order(assets) {
  refresh_snapshot();
}

void MarketState::refresh_snapshot() {
  mag_snapshot.resize(lattices.size());
  for (std::size_t k = 0; k < lattices.size(); ++k) mag_snapshot[k] = magnetization(lattices[k]);
}

double cross_field(const CouplingMatrix& gamma, std::span<const double> mags, std::size_t k) {
  const auto& g = gamma.entries();
  double sum = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    if (j != k) sum += g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * mags[j];
  }
  return sum;
}

double local_field(std::size_t k, std::size_t i, const MarketState& state,
                   const CouplingMatrix& gamma, const ModelParams& params) {
  if (k >= state.assets()) {
    throw std::out_of_range("asset index " + std::to_string(k) + " out of range");
  }
  const SpinLattice& lat = state.lattices[k];
  if (i >= lat.sites()) {
    throw std::out_of_range("site index " + std::to_string(i) + " out of range");
  }
  if (gamma.size() != state.assets()) {
    throw DimensionMismatch("coupling matrix size does not match asset count");
  }
  return field_value(params.J, lat.neighbor_sum(i), params.alpha, lat[i], magnetization(lat),
                     cross_field(gamma, state.mag_snapshot, k));
}

namespace {

void sweep_lattice(SpinLattice& lat, std::vector<std::uint32_t>& order,
                   const std::vector<std::uint32_t>& nb, double cross, const ModelParams& p,
                   Engine& eng) {
  const std::size_t sites = lat.sites();
  const double inv_sites = 1.0 / static_cast<double>(sites);

  order.resize(sites);
  std::iota(order.begin(), order.end(), 0u);
  for (std::size_t i = sites - 1; i > 0; --i) {
    std::swap(order[i], order[uniform_index(eng, i + 1)]);
  }

  long sum = lat.spin_sum();
  for (const std::uint32_t i : order) {
    const std::uint32_t* n = &nb[4 * static_cast<std::size_t>(i)];
    const int neighbor_sum = lat[n[0]] + lat[n[1]] + lat[n[2]] + lat[n[3]];
    const int spin = lat[i];
    const double own = static_cast<double>(sum) * inv_sites;
    const double h = field_value(p.J, neighbor_sum, p.alpha, spin, own, cross);
    const std::int8_t next = uniform01(eng) < flip_probability(h, p.beta) ? 1 : -1;
    sum += next - spin;
    lat.set(i, next);
  }
}

}  // namespace

std::vector<double> sweep(MarketState& state, const CouplingMatrix& gamma,
                          const ModelParams& params, RngPlan& rng, ThreadPool* pool) {
  const std::size_t n = state.assets();
  if (gamma.size() != n) throw DimensionMismatch("coupling matrix size does not match asset count");
  if (rng.engines.size() != n) throw DimensionMismatch("RNG plan size does not match asset count");

  state.refresh_snapshot();
  state.visit_order.resize(n);

  auto body = [&](std::size_t k) {
    const double cross = cross_field(gamma, state.mag_snapshot, k);
    sweep_lattice(state.lattices[k], state.visit_order[k], state.neighbor_table, cross, params,
                  rng.engines[k]);
  };
  if (pool != nullptr) {
    pool->parallel_for(n, body);
  } else {
    for (std::size_t k = 0; k < n; ++k) body(k);
  }

  std::vector<double> returns(n);
  for (std::size_t k = 0; k < n; ++k) {
    returns[k] = (magnetization(state.lattices[k]) - state.mag_snapshot[k]) / 2.0;
  }
  ++state.t;
  return returns;
}

ReturnPanel run_simulation(const ModelParams& params, const CouplingMatrix& gamma,
                           ThreadPool* pool, const SweepObserver& observer) {
  validate_params(params);
  if (gamma.size() != params.N) {
    throw DimensionMismatch("coupling matrix is " + std::to_string(gamma.size()) + "x" +
                            std::to_string(gamma.size()) + " but model.N is " +
                            std::to_string(params.N));
  }

  MarketState state(params.L, params.N, 1);
  RngPlan rng(params.master_seed, params.N);
  ReturnPanel panel(params.N, params.collect_sweeps);

  const std::size_t total = params.therm_sweeps + params.collect_sweeps;
  for (std::size_t s = 0; s < total; ++s) {
    const auto r = sweep(state, gamma, params, rng, pool);
    if (s >= params.therm_sweeps) {
      const std::size_t t = s - params.therm_sweeps;
      for (std::size_t k = 0; k < params.N; ++k) panel(k, t) = r[k];
    }
    if (observer) observer(s, state);
  }
  return panel;
}

}  // namespace isingmkt
