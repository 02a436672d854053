#pragma once

#include <array>
#include <cstdint>

namespace charpipe {

/// SplitMix64 finalizer; used for seeding and seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

/// Stateless mix of two 64-bit words.
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

/// xoshiro256** seeded through SplitMix64. All derived draws (bounded
/// integers, uniform reals, Poisson) are implemented here rather than with
/// <random> distributions, whose output is implementation-defined, so streams
/// are identical across compilers and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();
  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01();
  /// Poisson(mean) by sequential inversion; large means are split into
  /// independent Poisson pieces.
  std::uint64_t poisson(double mean);

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace charpipe
