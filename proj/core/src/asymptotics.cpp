#include "spikecycle/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spikecycle/normal.hpp"

namespace spikecycle {

Vector variant_eigenvalues(const ModelSpec& spec) {
  if (spec.variant == Variant::kNormalized)
    return sym_eigenvalues(spec.theta_prior.covariance);
  return product_eigenvalues(spec.theta_prior.covariance,
                             spec.u_prior.covariance);
}

double mu_k(const ModelSpec& spec, int k) {
  if (k < 1) throw std::invalid_argument("mu_k: k must be >= 1");
  if (spec.variant == Variant::kNormalized)
    return trace_power(spec.theta_prior.covariance, k);
  return trace_power(
      Matrix(spec.theta_prior.covariance * spec.u_prior.covariance), k);
}

double sigma_k_sq(int k, double gamma) {
  if (k < 1) throw std::invalid_argument("sigma_k_sq: k must be >= 1");
  if (!(gamma > 0.0))
    throw std::invalid_argument("sigma_k_sq: gamma must be positive");
  return 2.0 * k * std::pow(gamma, k);
}

double sigma_b_sq(const Vector& h, double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("sigma_b_sq: gamma must be positive");
  const Eigen::Index kappa = h.size();
  double closed = 0.0;
  double series = 0.0;
  for (Eigen::Index i = 0; i < kappa; ++i) {
    for (Eigen::Index j = 0; j < kappa; ++j) {
      const double x = h(i) * h(j) / gamma;
      if (!(std::abs(x) < 1.0))
        throw std::domain_error(
            "sigma_b_sq: h_i h_j >= gamma for some pair (outside the "
            "contiguity regime)");
      closed += -0.5 * std::log1p(-x);
      // sum_k x^k / (2k), stopped when the geometric tail bound
      // |x|^{K+1} / ((K+1)(1-|x|)) drops below 1e-12.
      double partial = 0.0;
      double xpow = x;
      const double ax = std::abs(x);
      for (int k = 1;; ++k) {
        partial += xpow / (2.0 * k);
        const double tail =
            std::pow(ax, k + 1) / ((k + 1) * (1.0 - ax));
        if (tail < 1e-12) break;
        xpow *= x;
      }
      series += partial;
    }
  }
  if (std::abs(closed - series) > 1e-8)
    throw std::runtime_error(
        "sigma_b_sq: closed form and series disagree beyond 1e-8");
  return closed;
}

double contiguity_margin(const ModelSpec& spec) {
  const Matrix& st = spec.theta_prior.covariance;
  const Matrix& su = spec.u_prior.covariance;
  const Matrix& pt = spec.theta_prior.variance_proxy;
  const Matrix& pu = spec.u_prior.variance_proxy;
  if (spec.variant == Variant::kNormalized) {
    const Matrix root = inverse_sqrt_sym(su);
    return spec.gamma() -
           spectral_norm(Matrix(root * pu * root * pt)) * spectral_norm(st);
  }
  return spec.gamma() -
         spectral_norm(Matrix(pt * pu)) * spectral_norm(Matrix(st * su));
}

bool is_contiguous(const ModelSpec& spec) {
  return contiguity_margin(spec) > 0.0;
}

LimitingLlr limiting_llr_params(const ModelSpec& spec) {
  if (!is_contiguous(spec))
    throw std::domain_error(
        "limiting_llr_params: spec is not in the contiguous regime "
        "(contiguity_margin <= 0)");
  const double variance = sigma_b_sq(variant_eigenvalues(spec), spec.gamma());
  return LimitingLlr{-0.5 * variance, 0.5 * variance, variance};
}

double asymptotic_power(double alpha, double sigma_b) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("asymptotic_power: alpha must be in (0,1)");
  if (!(sigma_b >= 0.0))
    throw std::invalid_argument("asymptotic_power: sigma_b must be >= 0");
  return 1.0 - norm_cdf(norm_ppf(1.0 - alpha) - sigma_b);
}

double total_variation_limit(double sigma_b) {
  if (!(sigma_b >= 0.0))
    throw std::invalid_argument(
        "total_variation_limit: sigma_b must be >= 0");
  return 2.0 * norm_cdf(0.5 * sigma_b) - 1.0;
}

AsymptoticParams asymptotic_params(const ModelSpec& spec, int k_max) {
  if (k_max < 1)
    throw std::invalid_argument("asymptotic_params: k_max must be >= 1");
  AsymptoticParams out;
  out.gamma = spec.gamma();
  out.h = variant_eigenvalues(spec);
  out.mu.reserve(k_max);
  out.sigma_k.reserve(k_max);
  for (int k = 1; k <= k_max; ++k) {
    out.mu.push_back(mu_k(spec, k));
    out.sigma_k.push_back(sigma_k_sq(k, out.gamma));
  }
  out.margin = contiguity_margin(spec);
  out.contiguous = out.margin > 0.0;
  out.sigma_b_sq = std::numeric_limits<double>::quiet_NaN();
  if (out.contiguous) {
    try {
      out.sigma_b_sq = sigma_b_sq(out.h, out.gamma);
    } catch (const std::domain_error&) {
      // Possible only with a user proxy that understates the
      // covariance; the margin flag stays as computed.
    }
  }
  return out;
}

}  // namespace spikecycle
