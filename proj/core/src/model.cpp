#include "spikecycle/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spikecycle {

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::kGaussianRows: return "gaussian-rows";
    case PriorKind::kRademacherRows: return "rademacher-rows";
    case PriorKind::kBoundedDiscreteRows: return "bounded-discrete-rows";
  }
  return "unknown";
}

std::string to_string(Variant variant) {
  return variant == Variant::kUnnormalized ? "unnormalized" : "normalized";
}

std::string to_string(Hypothesis hypothesis) {
  return hypothesis == Hypothesis::kNull ? "null" : "alternative";
}

PriorSpec PriorSpec::gaussian(const Matrix& covariance) {
  PriorSpec prior;
  prior.kind = PriorKind::kGaussianRows;
  prior.dim = static_cast<int>(covariance.rows());
  prior.covariance = covariance;
  prior.variance_proxy = covariance;
  return prior;
}

PriorSpec PriorSpec::rademacher(int dim) {
  PriorSpec prior;
  prior.kind = PriorKind::kRademacherRows;
  prior.dim = dim;
  prior.covariance = Matrix::Identity(dim, dim);
  prior.variance_proxy = prior.covariance;
  return prior;
}

PriorSpec PriorSpec::bounded_discrete(std::vector<Vector> atoms,
                                      std::vector<double> weights) {
  PriorSpec prior;
  prior.kind = PriorKind::kBoundedDiscreteRows;
  prior.dim = atoms.empty() ? 0 : static_cast<int>(atoms.front().size());
  prior.atoms = std::move(atoms);
  prior.weights = std::move(weights);
  if (prior.dim > 0 && prior.atoms.size() == prior.weights.size()) {
    Matrix cov = Matrix::Zero(prior.dim, prior.dim);
    for (std::size_t a = 0; a < prior.atoms.size(); ++a)
      if (prior.atoms[a].size() == prior.dim)
        cov += prior.weights[a] * prior.atoms[a] * prior.atoms[a].transpose();
    prior.covariance = cov;
    // Quarter squared range per coordinate, assembled diagonally.
    Vector lo = prior.atoms.front();
    Vector hi = prior.atoms.front();
    for (const auto& atom : prior.atoms) {
      if (atom.size() != prior.dim) continue;
      lo = lo.cwiseMin(atom);
      hi = hi.cwiseMax(atom);
    }
    prior.variance_proxy =
        (0.25 * (hi - lo).array().square()).matrix().asDiagonal();
  }
  return prior;
}

PriorSpec PriorSpec::scaled_rademacher(double lambda) {
  Vector plus(1), minus(1);
  plus << lambda;
  minus << -lambda;
  return bounded_discrete({minus, plus}, {0.5, 0.5});
}

PriorSpec& PriorSpec::with_variance_proxy(const Matrix& proxy) {
  variance_proxy = proxy;
  return *this;
}

std::vector<std::string> PriorSpec::validate() const {
  std::vector<std::string> violations;
  if (dim < 1) violations.push_back("prior dim must be >= 1");
  const auto check_sym_psd = [&](const Matrix& m, const char* name) {
    if (m.rows() != dim || m.cols() != dim) {
      std::ostringstream os;
      os << name << " must be " << dim << "x" << dim;
      violations.push_back(os.str());
      return;
    }
    if (!is_symmetric(m, 1e-10))
      violations.push_back(std::string(name) + " must be symmetric");
    else if (!is_psd(m, 1e-10))
      violations.push_back(std::string(name) +
                           " must be positive semidefinite (tol 1e-10)");
  };
  if (dim >= 1) {
    check_sym_psd(covariance, "covariance");
    check_sym_psd(variance_proxy, "variance_proxy");
  }
  switch (kind) {
    case PriorKind::kGaussianRows:
      if (!atoms.empty() || !weights.empty())
        violations.push_back("gaussian-rows takes no atoms or weights");
      break;
    case PriorKind::kRademacherRows: {
      if (!atoms.empty() || !weights.empty())
        violations.push_back("rademacher-rows takes no atoms or weights");
      if (dim >= 1 && covariance.rows() == dim &&
          max_abs(covariance - Matrix::Identity(dim, dim)) > 1e-12)
        violations.push_back("rademacher-rows covariance is pinned to identity");
      if (dim >= 1 && variance_proxy.rows() == dim &&
          max_abs(variance_proxy - Matrix::Identity(dim, dim)) > 1e-12)
        violations.push_back(
            "rademacher-rows variance_proxy is pinned to identity");
      break;
    }
    case PriorKind::kBoundedDiscreteRows: {
      if (atoms.empty()) violations.push_back("atoms must be non-empty");
      if (atoms.size() != weights.size())
        violations.push_back("atoms and weights must have equal length");
      for (std::size_t a = 0; a < atoms.size(); ++a)
        if (atoms[a].size() != dim) {
          std::ostringstream os;
          os << "atom " << a << " must have dim " << dim;
          violations.push_back(os.str());
        }
      double total = 0.0;
      for (std::size_t a = 0; a < weights.size(); ++a) {
        if (!(weights[a] > 0.0)) {
          std::ostringstream os;
          os << "weight " << a << " must be positive";
          violations.push_back(os.str());
        }
        total += weights[a];
      }
      if (!weights.empty() && std::abs(total - 1.0) > 1e-12)
        violations.push_back("weights must sum to 1 (tol 1e-12)");
      if (!atoms.empty() && atoms.size() == weights.size()) {
        Vector mean = Vector::Zero(dim);
        bool dims_ok = true;
        for (std::size_t a = 0; a < atoms.size(); ++a) {
          if (atoms[a].size() != dim) { dims_ok = false; break; }
          mean += weights[a] * atoms[a];
        }
        if (dims_ok && mean.size() > 0 && mean.cwiseAbs().maxCoeff() > 1e-12)
          violations.push_back("atom mixture must have mean zero (tol 1e-12)");
      }
      break;
    }
  }
  return violations;
}

std::vector<std::string> PriorSpec::warnings() const {
  std::vector<std::string> notes;
  if (covariance.rows() == dim && variance_proxy.rows() == dim &&
      covariance.cols() == dim && variance_proxy.cols() == dim &&
      !is_psd(variance_proxy - covariance, 1e-10))
    notes.push_back(
        "variance_proxy does not dominate the covariance; threshold "
        "guarantees quoting the proxy may be loose or invalid");
  return notes;
}

bool PriorSpec::is_discrete() const {
  return kind != PriorKind::kGaussianRows;
}

std::vector<std::pair<Vector, double>> PriorSpec::support() const {
  std::vector<std::pair<Vector, double>> points;
  switch (kind) {
    case PriorKind::kGaussianRows:
      throw std::domain_error("support: gaussian rows are not enumerable");
    case PriorKind::kRademacherRows: {
      if (dim > 20)
        throw std::domain_error("support: rademacher support too large");
      const std::size_t count = std::size_t{1} << dim;
      const double w = 1.0 / static_cast<double>(count);
      for (std::size_t mask = 0; mask < count; ++mask) {
        Vector atom(dim);
        for (int c = 0; c < dim; ++c)
          atom(c) = (mask >> c) & 1 ? 1.0 : -1.0;
        points.emplace_back(std::move(atom), w);
      }
      break;
    }
    case PriorKind::kBoundedDiscreteRows:
      for (std::size_t a = 0; a < atoms.size(); ++a)
        points.emplace_back(atoms[a], weights[a]);
      break;
  }
  return points;
}

std::vector<std::string> ModelSpec::validate(bool strict_rank) const {
  std::vector<std::string> violations;
  if (n < 1) violations.push_back("n must be >= 1");
  if (p < 1) violations.push_back("p must be >= 1");
  if (kappa < 1) violations.push_back("kappa must be >= 1");
  if (kappa >= 1 && n >= 1 && p >= 1) {
    if (strict_rank && kappa >= std::min(n, p))
      violations.push_back("kappa must be smaller than min(n, p)");
    if (!strict_rank && kappa > std::min(n, p))
      violations.push_back("kappa must be at most min(n, p)");
  }
  if (theta_prior.dim != kappa)
    violations.push_back("theta_prior dim must equal kappa");
  if (u_prior.dim != kappa)
    violations.push_back("u_prior dim must equal kappa");
  for (const auto& v : theta_prior.validate())
    violations.push_back("theta_prior: " + v);
  for (const auto& v : u_prior.validate())
    violations.push_back("u_prior: " + v);
  return violations;
}

std::vector<std::string> ModelSpec::warnings() const {
  std::vector<std::string> notes;
  for (const auto& w : theta_prior.warnings())
    notes.push_back("theta_prior: " + w);
  for (const auto& w : u_prior.warnings())
    notes.push_back("u_prior: " + w);
  return notes;
}

void ModelSpec::ensure_valid(bool strict_rank) const {
  const auto violations = validate(strict_rank);
  if (violations.empty()) return;
  std::ostringstream os;
  os << "invalid model spec:";
  for (const auto& v : violations) os << "\n  - " << v;
  throw std::invalid_argument(os.str());
}

}  // namespace spikecycle
