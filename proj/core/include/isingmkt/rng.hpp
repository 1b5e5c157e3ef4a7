#pragma once

#include <cstdint>
#include <random>

namespace isingmkt {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for an independent stream identified by (master, stream).
/// Distinct stream ids give statistically unrelated engines.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

Engine make_engine(std::uint64_t master, std::uint64_t stream);

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Unbiased uniform integer in [0, n). n must be positive.
std::uint64_t uniform_index(Engine& eng, std::uint64_t n);

/// Stream ids reserved for top-level consumers of the master seed.
namespace streams {
inline constexpr std::uint64_t kCoupling = 0xC0C0'0000'0000'0001ULL;
inline constexpr std::uint64_t kShuffle = 0x5AF1'0000'0000'0002ULL;
inline constexpr std::uint64_t kAssetBase = 0;
}  // namespace streams

}  // namespace isingmkt
