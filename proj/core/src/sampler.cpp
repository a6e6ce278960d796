#include "spikecycle/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace spikecycle {

Matrix sample_prior_rows(const PriorSpec& prior, int rows, Rng& rng) {
  if (rows < 0) throw std::invalid_argument("sample_prior_rows: rows < 0");
  Matrix out(rows, prior.dim);
  switch (prior.kind) {
    case PriorKind::kGaussianRows: {
      const Matrix root = sym_sqrt(prior.covariance);
      Vector z(prior.dim);
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < prior.dim; ++c) z(c) = rng.normal();
        out.row(r) = (root * z).transpose();
      }
      break;
    }
    case PriorKind::kRademacherRows:
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < prior.dim; ++c) out(r, c) = rng.rademacher();
      break;
    case PriorKind::kBoundedDiscreteRows: {
      // Inverse CDF walk; one uniform per row.
      std::vector<double> cumulative(prior.weights.size());
      double acc = 0.0;
      for (std::size_t a = 0; a < prior.weights.size(); ++a) {
        acc += prior.weights[a];
        cumulative[a] = acc;
      }
      cumulative.back() = 1.0;
      for (int r = 0; r < rows; ++r) {
        const double u = rng.uniform();
        std::size_t a = 0;
        while (a + 1 < cumulative.size() && u >= cumulative[a]) ++a;
        out.row(r) = prior.atoms[a].transpose();
      }
      break;
    }
  }
  return out;
}

LatentDraw sample_latents(const ModelSpec& spec, std::uint64_t seed) {
  spec.ensure_valid();
  LatentDraw draw;
  {
    Rng rng(derive_rep_seed(seed, 0));
    draw.theta = sample_prior_rows(spec.theta_prior, spec.n, rng);
  }
  {
    Rng rng(derive_rep_seed(seed, 1));
    draw.u = sample_prior_rows(spec.u_prior, spec.p, rng);
  }
  if (spec.variant == Variant::kNormalized) {
    const double floor = 1e-12 * spec.p;
    for (int attempt = 0;; ++attempt) {
      try {
        const Matrix gram = draw.u.transpose() * draw.u;
        draw.v = draw.u * inverse_sqrt_sym(gram, floor);
        break;
      } catch (const std::domain_error&) {
        if (attempt >= 3)
          throw std::runtime_error(
              "sample_latents: U'U stayed rank deficient after 3 resamples");
        Rng rng(derive_rep_seed(seed, 3 + attempt));
        draw.u = sample_prior_rows(spec.u_prior, spec.p, rng);
      }
    }
  }
  return draw;
}

Matrix signal_mean(const ModelSpec& spec, const LatentDraw& latents) {
  if (spec.variant == Variant::kNormalized)
    return latents.theta * latents.v.transpose();
  return (1.0 / std::sqrt(static_cast<double>(spec.p))) * latents.theta *
         latents.u.transpose();
}

DataMatrix sample_null(int n, int p, std::uint64_t seed) {
  if (n < 1 || p < 1)
    throw std::invalid_argument("sample_null: n and p must be >= 1");
  DataMatrix x;
  x.values.resize(n, p);
  x.provenance = Hypothesis::kNull;
  x.seed = seed;
  Rng rng(seed);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x.values(i, j) = rng.normal();
  return x;
}

SampleBundle sample_alternative(const ModelSpec& spec, std::uint64_t seed) {
  spec.ensure_valid();
  SampleBundle bundle;
  LatentDraw latents = sample_latents(spec, seed);
  bundle.x.values = signal_mean(spec, latents);
  {
    Rng rng(derive_rep_seed(seed, 2));
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.p; ++j) bundle.x.values(i, j) += rng.normal();
  }
  bundle.x.provenance = Hypothesis::kAlternative;
  bundle.x.seed = seed;
  bundle.theta = std::move(latents.theta);
  bundle.u = std::move(latents.u);
  bundle.v = std::move(latents.v);
  return bundle;
}

DataMatrix sample(const ModelSpec& spec, Hypothesis hypothesis,
                  std::uint64_t seed) {
  if (hypothesis == Hypothesis::kNull) {
    spec.ensure_valid();
    return sample_null(spec.n, spec.p, seed);
  }
  return sample_alternative(spec, seed).x;
}

}  // namespace spikecycle
