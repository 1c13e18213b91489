#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>

namespace ridgeboot {

/// SplitMix64 finalizer. A bijection on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

/// Derives a child seed from a master seed and an index path.
///
///   h_0     = mix64(master + G)
///   h_{k+1} = mix64(h_k * M + mix64(path[k] + (k + 1) * G))
///
/// with G = 0x9E3779B97F4A7C15 and M = 0xD1342543DE82EF95, all mod 2^64.
/// Only fixed-width integer arithmetic is used, so the result is identical on every platform.
std::uint64_t seed_split(std::uint64_t master, std::span<const std::uint64_t> path) noexcept;
std::uint64_t seed_split(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

/// xoshiro256** generator seeded through SplitMix64. Satisfies
/// UniformRandomBitGenerator, so it plugs into Boost.Random distributions.
/// Seeding is four SplitMix steps, which keeps per-replicate generators cheap.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform integer in [0, n) by 128-bit multiply-shift; no rejection step,
  /// per-outcome probability error at most 2^-64.
  std::size_t index(std::size_t n) noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Standard normal draw (Boost ziggurat).
  double normal();

  /// Fresh generator for an independent stream, consuming one word of this one.
  Rng fork() noexcept { return Rng((*this)()); }

 private:
  std::uint64_t s_[4];
};

}  // namespace ridgeboot
