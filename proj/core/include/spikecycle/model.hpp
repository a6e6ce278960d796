// Model descriptions: prior families for the spike factors, the spiked
// matrix model itself, and the sampled data types.
//
// Conventions. A model has n rows, p columns, spike rank kappa, and an
// aspect ratio gamma = p/n. Theta (n x kappa) and U (p x kappa) have
// i.i.d. rows drawn from the priors below. The observation is
//   unnormalized:  X = (1/sqrt(p)) Theta U' + Z
//   normalized:    X = Theta V' + Z,  V = U (U'U)^{-1/2}
// with Z i.i.d. standard normal. The null model is X = Z.
//
// Every prior carries a row covariance and a sub-Gaussian variance
// proxy. Defaults: gaussian rows use the covariance itself, rademacher
// rows are pinned to identity for both, bounded discrete rows default
// the proxy to the diagonal quarter-squared-range rule. A proxy that
// does not dominate the covariance is legal but reported as a warning,
// since the detection-threshold guarantees quote the proxy.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spikecycle/linalg.hpp"

namespace spikecycle {

enum class PriorKind { kGaussianRows, kRademacherRows, kBoundedDiscreteRows };
enum class Variant { kUnnormalized, kNormalized };
enum class Hypothesis { kNull, kAlternative };

[[nodiscard]] std::string to_string(PriorKind kind);
[[nodiscard]] std::string to_string(Variant variant);
[[nodiscard]] std::string to_string(Hypothesis hypothesis);

struct PriorSpec {
  PriorKind kind = PriorKind::kGaussianRows;
  int dim = 1;
  Matrix covariance;      // dim x dim, symmetric PSD
  Matrix variance_proxy;  // dim x dim, symmetric PSD
  // Bounded discrete rows only: atoms[a] is a dim-vector taken with
  // probability weights[a]. The mixture must have mean zero.
  std::vector<Vector> atoms;
  std::vector<double> weights;

  static PriorSpec gaussian(const Matrix& covariance);
  static PriorSpec rademacher(int dim);
  static PriorSpec bounded_discrete(std::vector<Vector> atoms,
                                    std::vector<double> weights);
  // Scalar spike of amplitude lambda: atoms {-lambda, +lambda} with
  // equal weight, covariance lambda^2.
  static PriorSpec scaled_rademacher(double lambda);

  PriorSpec& with_variance_proxy(const Matrix& proxy);

  // Hard violations (empty means usable).
  [[nodiscard]] std::vector<std::string> validate() const;
  // Soft findings, e.g. a proxy that does not dominate the covariance.
  [[nodiscard]] std::vector<std::string> warnings() const;

  // True when the support is finite and enumerable (rademacher or
  // bounded discrete).
  [[nodiscard]] bool is_discrete() const;
  // Enumerated support as (atom, weight) pairs; rademacher rows expand
  // to the 2^dim sign patterns. Throws for gaussian rows.
  [[nodiscard]] std::vector<std::pair<Vector, double>> support() const;
};

struct ModelSpec {
  Variant variant = Variant::kUnnormalized;
  int n = 0;
  int p = 0;
  int kappa = 1;
  PriorSpec theta_prior;
  PriorSpec u_prior;

  [[nodiscard]] double gamma() const { return static_cast<double>(p) / n; }
  // strict_rank = false relaxes kappa < min(n, p) to kappa <= min(n, p),
  // for ops whose math is well defined at full rank (likelihood oracles).
  [[nodiscard]] std::vector<std::string> validate(
      bool strict_rank = true) const;
  [[nodiscard]] std::vector<std::string> warnings() const;
  // validate() and throw std::invalid_argument listing all violations.
  void ensure_valid(bool strict_rank = true) const;
};

struct DataMatrix {
  Matrix values;  // n x p
  Hypothesis provenance = Hypothesis::kNull;
  std::uint64_t seed = 0;

  [[nodiscard]] int n() const { return static_cast<int>(values.rows()); }
  [[nodiscard]] int p() const { return static_cast<int>(values.cols()); }
  [[nodiscard]] double gamma_hat() const {
    return static_cast<double>(values.cols()) / values.rows();
  }
};

// An alternative draw with its latent factors kept for diagnostics.
// v is filled only for the normalized variant.
struct SampleBundle {
  DataMatrix x;
  Matrix theta;  // n x kappa
  Matrix u;      // p x kappa
  Matrix v;      // p x kappa or empty
};

}  // namespace spikecycle
