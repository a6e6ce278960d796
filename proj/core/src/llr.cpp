#include "spikecycle/llr.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "spikecycle/normal.hpp"
#include "spikecycle/parallel.hpp"
#include "spikecycle/rng.hpp"
#include "spikecycle/sampler.hpp"

namespace spikecycle {

int default_m(int n, int k_max) {
  if (n < 1) throw std::invalid_argument("default_m: n must be >= 1");
  if (k_max < 1) throw std::invalid_argument("default_m: k_max must be >= 1");
  const double grown = std::pow(std::log(static_cast<double>(n)), 0.25);
  int m = static_cast<int>(std::floor(grown));
  if (m < 1) m = 1;
  if (m > k_max) m = k_max;
  return m;
}

double anova_statistic(const Matrix& x, const ModelSpec& spec, int m,
                       const CycleOptions& opts) {
  spec.ensure_valid();
  if (x.rows() != spec.n || x.cols() != spec.p)
    throw std::invalid_argument("anova_statistic: matrix does not match spec");
  if (m < 1) throw std::invalid_argument("anova_statistic: m must be >= 1");
  const double gamma_hat = static_cast<double>(x.cols()) / x.rows();
  const CycleStats stats = cycle_vector(x, m, opts);
  std::vector<double> terms(m);
  for (int k = 1; k <= m; ++k) {
    const double mu = mu_k(spec, k);
    const double centered = stats.b[k - 1] - (k == 1 ? x.cols() : 0.0);
    terms[k - 1] = (2.0 * mu * centered - mu * mu) /
                   (4.0 * k * std::pow(gamma_hat, k));
  }
  return pairwise_sum(terms);
}

TestReport lr_test(const Matrix& x, const ModelSpec& spec, double alpha,
                   int m, const CycleOptions& opts) {
  spec.ensure_valid();
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("lr_test: alpha must be in (0,1)");
  const double margin = contiguity_margin(spec);
  if (!(margin > 0.0)) {
    std::ostringstream os;
    os << "lr_test: spec is outside the contiguous regime "
       << "(contiguity_margin = " << margin
       << "); the limiting test is not defined there";
    throw std::domain_error(os.str());
  }
  TestReport report;
  report.m = m > 0 ? m : default_m(spec.n, opts.k_max);
  report.alpha = alpha;
  report.statistic = anova_statistic(x, spec, report.m, opts);
  const double gamma_hat = static_cast<double>(x.cols()) / x.rows();
  std::vector<double> terms(report.m);
  for (int k = 1; k <= report.m; ++k) {
    const double mu = mu_k(spec, k);
    terms[k - 1] = mu * mu / (2.0 * k * std::pow(gamma_hat, k));
  }
  report.sigma_m_sq = pairwise_sum(terms);
  if (report.sigma_m_sq > 0.0) {
    const double z = (report.statistic + 0.5 * report.sigma_m_sq) /
                     std::sqrt(report.sigma_m_sq);
    report.p_value = 1.0 - norm_cdf(z);
  } else {
    // No signal within the first m orders: T_m is identically zero.
    report.p_value = 0.5;
  }
  report.reject = report.p_value < alpha;
  report.params = asymptotic_params(spec, opts.k_max);
  report.power = std::isnan(report.params.sigma_b_sq)
                     ? std::numeric_limits<double>::quiet_NaN()
                     : asymptotic_power(alpha, std::sqrt(report.params.sigma_b_sq));
  return report;
}

// ===== likelihood oracles ===================================================

double exact_likelihood_discrete(const Matrix& x, const ModelSpec& spec,
                                 double budget) {
  // The enumeration is well defined at kappa == min(n, p) (e.g. the
  // 1x1 closed form), so relax the strict rank constraint.
  spec.ensure_valid(false);
  if (x.rows() != spec.n || x.cols() != spec.p)
    throw std::invalid_argument(
        "exact_likelihood_discrete: matrix does not match spec");
  if (spec.variant != Variant::kUnnormalized)
    throw std::domain_error(
        "exact_likelihood_discrete: only the unnormalized variant is "
        "enumerable (the normalized variant conditions on a full-rank U)");
  if (!spec.theta_prior.is_discrete() || !spec.u_prior.is_discrete())
    throw std::domain_error(
        "exact_likelihood_discrete: both priors must be discrete");
  const auto theta_support = spec.theta_prior.support();
  const auto u_support = spec.u_prior.support();
  const double support_size = static_cast<double>(
      std::max(theta_support.size(), u_support.size()));
  if (std::pow(support_size, spec.n + spec.p) > budget)
    throw std::domain_error(
        "exact_likelihood_discrete: support^(n+p) exceeds the budget");

  const int n = spec.n, p = spec.p;
  const std::size_t s_theta = theta_support.size();
  const std::size_t s_u = u_support.size();
  const double inv_sqrt_p = 1.0 / std::sqrt(static_cast<double>(p));

  // Row factorization: conditionally on U the rows of Theta are
  // independent, so L = sum_U w(U) prod_i sum_a w_a exp(g(i,a,U)) with
  // g(i,a,U) = sum_j X_ij M_ij - M_ij^2/2 and M_ij = atom_a . u_j / sqrt(p).
  std::vector<std::size_t> assign(p, 0);
  std::vector<double> log_terms;
  Matrix cross(s_theta, s_u);  // atom_a . u_b
  for (std::size_t a = 0; a < s_theta; ++a)
    for (std::size_t b = 0; b < s_u; ++b)
      cross(a, b) = theta_support[a].first.dot(u_support[b].first);
  std::vector<double> log_w_theta(s_theta), log_w_u(s_u);
  for (std::size_t a = 0; a < s_theta; ++a)
    log_w_theta[a] = std::log(theta_support[a].second);
  for (std::size_t b = 0; b < s_u; ++b)
    log_w_u[b] = std::log(u_support[b].second);

  std::vector<double> row_terms(s_theta);
  for (;;) {
    double log_term = 0.0;
    for (int j = 0; j < p; ++j) log_term += log_w_u[assign[j]];
    for (int i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < s_theta; ++a) {
        double dot = 0.0, sq = 0.0;
        for (int j = 0; j < p; ++j) {
          const double mij = cross(a, assign[j]) * inv_sqrt_p;
          dot += x(i, j) * mij;
          sq += mij * mij;
        }
        row_terms[a] = log_w_theta[a] + dot - 0.5 * sq;
      }
      double row_max = row_terms[0];
      for (double t : row_terms) row_max = std::max(row_max, t);
      double acc = 0.0;
      for (double t : row_terms) acc += std::exp(t - row_max);
      log_term += row_max + std::log(acc);
    }
    log_terms.push_back(log_term);
    // Odometer over U assignments.
    int j = 0;
    while (j < p && ++assign[j] == s_u) assign[j++] = 0;
    if (j == p) break;
  }
  double shift = log_terms[0];
  for (double t : log_terms) shift = std::max(shift, t);
  std::vector<double> scaled(log_terms.size());
  for (std::size_t t = 0; t < log_terms.size(); ++t)
    scaled[t] = std::exp(log_terms[t] - shift);
  return std::exp(shift + std::log(pairwise_sum(scaled)));
}

LikelihoodEstimate mc_likelihood(const Matrix& x, const ModelSpec& spec,
                                 int r, std::uint64_t seed, int threads) {
  spec.ensure_valid(false);  // full-rank spikes average fine

  if (x.rows() != spec.n || x.cols() != spec.p)
    throw std::invalid_argument("mc_likelihood: matrix does not match spec");
  if (r < 1) throw std::invalid_argument("mc_likelihood: r must be >= 1");

  std::vector<double> logs(r);
  parallel_for(static_cast<std::size_t>(r), threads, [&](std::size_t t) {
    const LatentDraw draw =
        sample_latents(spec, derive_rep_seed(seed, t));
    const Matrix m = signal_mean(spec, draw);
    logs[t] = (x.cwiseProduct(m)).sum() - 0.5 * m.squaredNorm();
  });

  double shift = logs[0];
  for (double l : logs) shift = std::max(shift, l);
  std::vector<double> scaled(logs.size());
  for (std::size_t t = 0; t < logs.size(); ++t)
    scaled[t] = std::exp(logs[t] - shift);
  const double scaled_sum = pairwise_sum(scaled);
  LikelihoodEstimate out;
  out.log_estimate =
      shift + std::log(scaled_sum) - std::log(static_cast<double>(r));
  out.estimate = std::exp(out.log_estimate);
  if (r > 1) {
    const double scaled_mean = scaled_sum / r;
    std::vector<double> dev(scaled.size());
    for (std::size_t t = 0; t < scaled.size(); ++t) {
      const double d = scaled[t] - scaled_mean;
      dev[t] = d * d;
    }
    const double var = pairwise_sum(dev) / (r - 1);
    out.std_error = std::exp(shift) * std::sqrt(var / r);
  }
  return out;
}

}  // namespace spikecycle
