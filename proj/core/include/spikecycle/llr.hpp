// Likelihood ratio machinery.
//
// The truncated quadratic expansion of the log likelihood ratio is
//
//   T_m = sum_{k=1}^{m} [ 2 mu_k (B_{n,k} - p 1{k=1}) - mu_k^2 ]
//                        / (4 k gamma_hat^k),  gamma_hat = p/n,
//
// which under the null approaches N(-sigma_m^2/2, sigma_m^2) with
// sigma_m^2 = sum_{k<=m} mu_k^2 / (2 k gamma_hat^k). The level-alpha
// test rejects for large T_m.
//
// Two likelihood evaluators serve as oracles for T_m at desk scale:
// exact_likelihood_discrete enumerates the full prior support, and
// mc_likelihood averages exp(sum X.M - |M|^2/2) over independent prior
// draws in log space. The Monte Carlo average is unbiased at any size,
// but the number of draws needed for a faithful log grows like
// exp(Var(sum X.M)) = exp(O(n)), so treat it as a small-n oracle only.
#pragma once

#include <cstdint>

#include "spikecycle/asymptotics.hpp"
#include "spikecycle/cycles.hpp"
#include "spikecycle/model.hpp"

namespace spikecycle {

// max(1, floor((log n)^{1/4})), capped at k_max. Slow growth keeps the
// truncation inside the regime where the expansion is valid.
[[nodiscard]] int default_m(int n, int k_max = 6);

// T_m as above. x must match the model's n and p.
[[nodiscard]] double anova_statistic(const Matrix& x, const ModelSpec& spec,
                                     int m, const CycleOptions& opts = {});

struct TestReport {
  double statistic = 0.0;   // T_m
  int m = 0;                // truncation order used
  double alpha = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double sigma_m_sq = 0.0;  // truncated series variance
  double power = 0.0;       // asymptotic power at sigma_b
  AsymptoticParams params;  // includes sigma_b and the margin
};

// Level-alpha test. m == 0 selects default_m(n). Requires a contiguous
// spec; throws std::domain_error naming the margin otherwise.
// p_value = 1 - Phi((T + sigma_m^2/2) / sigma_m); a zero sigma_m (no
// signal in the first m orders) yields p_value 0.5.
[[nodiscard]] TestReport lr_test(const Matrix& x, const ModelSpec& spec,
                                 double alpha = 0.05, int m = 0,
                                 const CycleOptions& opts = {});

// Exact likelihood ratio for fully discrete priors (bounded discrete
// or rademacher rows), unnormalized variant only. Enumerates
// support^(n+p) terms; throws std::domain_error when
// max(support sizes)^(n+p) exceeds the budget.
[[nodiscard]] double exact_likelihood_discrete(const Matrix& x,
                                               const ModelSpec& spec,
                                               double budget = 1e6);

struct LikelihoodEstimate {
  double estimate = 0.0;      // (1/r) sum exp(l_t)
  double std_error = 0.0;     // sample sd of exp(l_t) / sqrt(r)
  double log_estimate = 0.0;  // log of estimate, formed without overflow
};

// Plain Monte Carlo likelihood: r independent prior draws, each
// contributing exp(sum_ij X_ij M_ij - M_ij^2/2). All accumulation is
// in log space with a max shift. The normalized variant draws a fresh
// U (and its V) per replicate. Deterministic in (seed, r) for any
// thread count.
[[nodiscard]] LikelihoodEstimate mc_likelihood(const Matrix& x,
                                               const ModelSpec& spec, int r,
                                               std::uint64_t seed,
                                               int threads = 1);

}  // namespace spikecycle
