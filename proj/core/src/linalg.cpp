#include "spikecycle/linalg.hpp"

#include <stdexcept>

namespace spikecycle {

double spectral_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.transpose()) <= tol * std::max(1.0, max_abs(m));
}

bool is_psd(const Matrix& m, double tol) {
  if (!is_symmetric(m, 1e-10)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  const double scale = std::max(1.0, std::abs(es.eigenvalues().maxCoeff()));
  return es.eigenvalues().minCoeff() >= -tol * scale;
}

Vector sym_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sym_eigenvalues: eigensolver failed");
  return es.eigenvalues().reverse();
}

Vector product_eigenvalues(const Matrix& sigma_theta, const Matrix& sigma_u) {
  if (sigma_theta.rows() != sigma_u.rows() ||
      sigma_theta.cols() != sigma_u.cols() ||
      sigma_theta.rows() != sigma_theta.cols())
    throw std::invalid_argument("product_eigenvalues: dimension mismatch");
  const Matrix root = sym_sqrt(sigma_u);
  const Matrix conj = root * sigma_theta * root;
  return sym_eigenvalues(0.5 * (conj + conj.transpose()));
}

double trace_power(const Matrix& m, int k) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("trace_power: matrix must be square");
  if (k < 1) throw std::invalid_argument("trace_power: k must be >= 1");
  if (k == 1) return m.trace();
  Matrix acc = m;
  for (int i = 1; i + 1 < k; ++i) acc = acc * m;
  return (acc * m).trace();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix sym_sqrt(const Matrix& m) {
  if (!is_symmetric(m, 1e-9))
    throw std::invalid_argument("sym_sqrt: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sym_sqrt: eigensolver failed");
  Vector vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    // Clamp roundoff-negative eigenvalues of a PSD input.
    if (vals(i) < 0.0) {
      if (vals(i) < -1e-10 * std::max(1.0, std::abs(vals.maxCoeff())))
        throw std::domain_error("sym_sqrt: matrix is not PSD");
      vals(i) = 0.0;
    }
  }
  return es.eigenvectors() * vals.cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

Matrix inverse_sqrt_sym(const Matrix& s, double min_eig) {
  if (!is_symmetric(s, 1e-9))
    throw std::invalid_argument("inverse_sqrt_sym: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("inverse_sqrt_sym: eigensolver failed");
  const Vector vals = es.eigenvalues();
  if (vals.minCoeff() <= min_eig)
    throw std::domain_error(
        "inverse_sqrt_sym: matrix is singular at the requested floor");
  const Matrix root = es.eigenvectors() *
                      vals.cwiseSqrt().cwiseInverse().asDiagonal() *
                      es.eigenvectors().transpose();
  if (max_abs(root * s * root - Matrix::Identity(s.rows(), s.cols())) > 1e-10)
    throw std::runtime_error("inverse_sqrt_sym: residual check failed");
  return root;
}

}  // namespace spikecycle
