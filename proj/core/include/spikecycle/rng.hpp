// Random number generation.
//
// The generator is pinned so that a (seed, algorithm-version) pair
// reproduces streams bit-exactly across platforms and thread counts:
//
//   version "spikecycle-rng-v1"
//   - state seeding: splitmix64 fill from the 64-bit seed
//   - stream: xoshiro256++
//   - uniform double in [0,1): top 53 bits scaled by 2^-53
//   - standard normal: inverse CDF (AS 241) applied to a uniform
//     mapped into the open interval (0,1)
//
// Replicate seeds come from derive_rep_seed, a splitmix64-style mix of
// (master_seed, index). The map is injective in the index for a fixed
// master seed, so parallel replicates never share a stream.
#pragma once

#include <array>
#include <cstdint>

namespace spikecycle {

inline constexpr const char* kRngVersion = "spikecycle-rng-v1";

// splitmix64 state update + output mix (Vigna). Used for seeding only.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable per-replicate seed. Injective in rep for fixed master_seed
// (the additive step is a bijection composed with the splitmix64
// finalizer, itself a bijection).
[[nodiscard]] std::uint64_t derive_rep_seed(std::uint64_t master_seed,
                                            std::uint64_t rep);

// xoshiro256++ with a fixed seeding discipline.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Raw 64 uniform bits.
  std::uint64_t next_u64();

  // Uniform on [0,1), 53-bit resolution.
  double uniform();

  // Uniform on the open interval (0,1); safe as a quantile argument.
  double uniform_open();

  // Standard normal via norm_ppf(uniform_open()).
  double normal();

  // -1.0 or +1.0 with equal probability (single stream step).
  double rademacher();

  // Index in [0, n) from a single stream step; n must be positive.
  // Lemire-style rejection keeps the draw unbiased.
  std::uint64_t below(std::uint64_t n);

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace spikecycle
