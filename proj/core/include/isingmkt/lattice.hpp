#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace isingmkt {

/// One asset's L x L grid of +/-1 agents on a torus.
class SpinLattice {
public:
  /// All spins set to `fill` (must be +1 or -1).
  explicit SpinLattice(std::size_t side, std::int8_t fill = 1);

  /// Row-major spins; throws InvalidArgument on size mismatch or a value
  /// other than +/-1.
  SpinLattice(std::size_t side, std::vector<std::int8_t> spins);

  std::size_t side() const noexcept { return side_; }
  std::size_t sites() const noexcept { return spins_.size(); }

  std::int8_t operator[](std::size_t i) const noexcept { return spins_[i]; }
  void set(std::size_t i, std::int8_t s) noexcept { spins_[i] = s; }

  std::span<const std::int8_t> spins() const noexcept { return spins_; }

  /// Sum of all spins; magnetization is spin_sum() / sites().
  long spin_sum() const noexcept;

  /// Indices of the right, left, down and up neighbors of site i.
  std::array<std::size_t, 4> neighbors(std::size_t i) const noexcept;

  /// Sum of the four neighbor spins of site i.
  int neighbor_sum(std::size_t i) const noexcept;

private:
  std::size_t side_;
  std::vector<std::int8_t> spins_;
};

/// (1/P) times the sum of spins.
double magnetization(const SpinLattice& lattice) noexcept;

/// Flattened neighbor table (4 entries per site) for a periodic L x L grid.
std::vector<std::uint32_t> torus_neighbor_table(std::size_t side);

}  // namespace isingmkt
