// Samplers for the null and spiked models.
//
// Reproducibility contract: a (ModelSpec, seed) pair fully determines
// the output. Sub-streams are derived, never shared:
//   derive_rep_seed(seed, 0) -> Theta rows
//   derive_rep_seed(seed, 1) -> U rows
//   derive_rep_seed(seed, 2) -> noise Z
//   derive_rep_seed(seed, 3 + a) -> attempt a of a U resample
// Matrices fill row by row; gaussian rows consume dim normals each.
#pragma once

#include <cstdint>

#include "spikecycle/model.hpp"
#include "spikecycle/rng.hpp"

namespace spikecycle {

// Latent factor draw (no noise). v is computed for the normalized
// variant: v = u (u'u)^{-1/2}, resampling u up to 3 times when u'u is
// rank deficient (min eigenvalue <= 1e-12 * p), then throwing
// std::runtime_error.
struct LatentDraw {
  Matrix theta;  // n x kappa
  Matrix u;      // p x kappa
  Matrix v;      // p x kappa, empty for the unnormalized variant
};

// rows x prior.dim matrix of i.i.d. prior rows, consuming rng.
[[nodiscard]] Matrix sample_prior_rows(const PriorSpec& prior, int rows,
                                       Rng& rng);

[[nodiscard]] LatentDraw sample_latents(const ModelSpec& spec,
                                        std::uint64_t seed);

// Signal mean M: (1/sqrt(p)) theta u' (unnormalized) or theta v'
// (normalized).
[[nodiscard]] Matrix signal_mean(const ModelSpec& spec,
                                 const LatentDraw& latents);

[[nodiscard]] DataMatrix sample_null(int n, int p, std::uint64_t seed);

[[nodiscard]] SampleBundle sample_alternative(const ModelSpec& spec,
                                              std::uint64_t seed);

// Dispatch on hypothesis; null draws ignore the priors.
[[nodiscard]] DataMatrix sample(const ModelSpec& spec, Hypothesis hypothesis,
                                std::uint64_t seed);

}  // namespace spikecycle
