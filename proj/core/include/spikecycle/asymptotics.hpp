// Limiting quantities for the detection problem.
//
// Variant conventions: with gamma = p/n,
//   unnormalized:  mu_k = tr((Sigma_Theta Sigma_U)^k), h = eigenvalues
//                  of Sigma_Theta Sigma_U, contiguity condition
//                  ||proxy_Theta proxy_U|| * ||Sigma_Theta Sigma_U|| < gamma
//   normalized:    mu_k = tr(Sigma_Theta^k), h = eigenvalues of
//                  Sigma_Theta, condition
//                  ||Sigma_U^{-1/2} proxy_U Sigma_U^{-1/2} proxy_Theta||
//                  * ||Sigma_Theta|| < gamma.
//
// Inside the contiguous regime the log likelihood ratio converges to
// N(-sigma_b^2/2, sigma_b^2) under the null and N(+sigma_b^2/2,
// sigma_b^2) under the alternative, where
//
//   sigma_b^2 = sum_{k>=1} mu_k^2 / (2 k gamma^k)
//             = -(1/2) sum_{i,j} log(1 - h_i h_j / gamma).
//
// The series is the ground truth; the closed form is its exact sum
// (expand -log(1-x)). Both are evaluated and cross-checked here.
#pragma once

#include <vector>

#include "spikecycle/linalg.hpp"
#include "spikecycle/model.hpp"

namespace spikecycle {

// Eigenvalues h for the model's variant, descending.
[[nodiscard]] Vector variant_eigenvalues(const ModelSpec& spec);

// mu_k for the model's variant, k >= 1.
[[nodiscard]] double mu_k(const ModelSpec& spec, int k);

// Null variance of the centered order-k cycle statistic: 2 k gamma^k.
[[nodiscard]] double sigma_k_sq(int k, double gamma);

// Limiting LLR variance from eigenvalues h and gamma. Requires
// max_ij h_i h_j < gamma (strict); throws std::domain_error otherwise.
// Evaluates both the closed form and the adaptively truncated series
// (per-pair tail bound < 1e-12) and throws std::runtime_error if they
// disagree beyond 1e-8.
[[nodiscard]] double sigma_b_sq(const Vector& h, double gamma);

// gamma minus the variant's operator-norm product; > 0 means the
// alternative is contiguous to the null at this spec.
[[nodiscard]] double contiguity_margin(const ModelSpec& spec);

[[nodiscard]] bool is_contiguous(const ModelSpec& spec);

struct LimitingLlr {
  double null_mean = 0.0;  // -sigma_b^2 / 2
  double alt_mean = 0.0;   // +sigma_b^2 / 2
  double variance = 0.0;   // sigma_b^2
};

// Requires contiguity_margin(spec) > 0.
[[nodiscard]] LimitingLlr limiting_llr_params(const ModelSpec& spec);

// Power of the level-alpha asymptotic test: 1 - Phi(z_{1-alpha} - sigma_b).
// Equals alpha when sigma_b = 0.
[[nodiscard]] double asymptotic_power(double alpha, double sigma_b);

// Limiting total variation distance between null and alternative:
// 2 Phi(sigma_b / 2) - 1.
[[nodiscard]] double total_variation_limit(double sigma_b);

struct AsymptoticParams {
  double gamma = 0.0;
  Vector h;
  std::vector<double> mu;          // mu_1 .. mu_kmax
  std::vector<double> sigma_k;     // sigma_k_sq(1..kmax, gamma)
  double sigma_b_sq = 0.0;         // full series variance of the LLR
  double margin = 0.0;
  bool contiguous = false;
};

// Bundle of everything above; sigma_b is NaN outside the contiguous
// regime (the margin and flag still report).
[[nodiscard]] AsymptoticParams asymptotic_params(const ModelSpec& spec,
                                                 int k_max = 6);

}  // namespace spikecycle
