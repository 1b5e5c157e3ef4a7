#include "isingmkt/lattice.hpp"

#include <numeric>

#include "isingmkt/error.hpp"

namespace isingmkt {

SpinLattice::SpinLattice(std::size_t side, std::int8_t fill) : side_(side) {
  if (side < 2) throw InvalidArgument("lattice side must be at least 2");
  if (fill != 1 && fill != -1) throw InvalidArgument("spin fill value must be +1 or -1");
  spins_.assign(side * side, fill);
}

SpinLattice::SpinLattice(std::size_t side, std::vector<std::int8_t> spins)
    : side_(side), spins_(std::move(spins)) {
  if (side < 2) throw InvalidArgument("lattice side must be at least 2");
  if (spins_.size() != side * side) {
    throw InvalidArgument("spin vector length does not equal side * side");
  }
  for (auto s : spins_) {
    if (s != 1 && s != -1) throw InvalidArgument("spin values must be +1 or -1");
  }
}

long SpinLattice::spin_sum() const noexcept {
  return std::accumulate(spins_.begin(), spins_.end(), 0L);
}

std::array<std::size_t, 4> SpinLattice::neighbors(std::size_t i) const noexcept {
  const std::size_t x = i % side_;
  const std::size_t y = i / side_;
  const std::size_t row = y * side_;
  return {row + (x + 1) % side_, row + (x + side_ - 1) % side_,
          ((y + 1) % side_) * side_ + x, ((y + side_ - 1) % side_) * side_ + x};
}

int SpinLattice::neighbor_sum(std::size_t i) const noexcept {
  int sum = 0;
  for (auto j : neighbors(i)) sum += spins_[j];
  return sum;
}

double magnetization(const SpinLattice& lattice) noexcept {
  return static_cast<double>(lattice.spin_sum()) / static_cast<double>(lattice.sites());
}

std::vector<std::uint32_t> torus_neighbor_table(std::size_t side) {
  const SpinLattice probe(side);
  std::vector<std::uint32_t> table(4 * probe.sites());
  for (std::size_t i = 0; i < probe.sites(); ++i) {
    const auto nb = probe.neighbors(i);
    for (std::size_t d = 0; d < 4; ++d) table[4 * i + d] = static_cast<std::uint32_t>(nb[d]);
  }
  return table;
}

}  // namespace isingmkt
