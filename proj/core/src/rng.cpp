#include "spikecycle/rng.hpp"

#include <stdexcept>

#include "spikecycle/normal.hpp"

namespace spikecycle {

std::uint64_t derive_rep_seed(std::uint64_t master_seed, std::uint64_t rep) {
  std::uint64_t state = master_seed ^ 0x6a09e667f3bcc909ULL;
  std::uint64_t mixed = splitmix64(state);
  state = mixed + rep;
  return splitmix64(state);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

static inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  // (k + 0.5) * 2^-53 lies in (0,1) for every k, symmetrically.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return norm_ppf(uniform_open()); }

double Rng::rademacher() {
  return (next_u64() >> 63) ? 1.0 : -1.0;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x < limit) return x % n;
  }
}

}  // namespace spikecycle
