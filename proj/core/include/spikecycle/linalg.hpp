// Small dense linear algebra helpers shared by the model layer.
//
// Everything here operates on kappa x kappa matrices (kappa is the
// spike rank, typically < 10), so clarity wins over blocking tricks.
#pragma once

#include <Eigen/Dense>

namespace spikecycle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Largest singular value. Works for non-symmetric inputs, which is what
// contiguity checks need: products of covariances are not symmetric.
[[nodiscard]] double spectral_norm(const Matrix& m);

// max |m(i,j)|.
[[nodiscard]] double max_abs(const Matrix& m);

// Symmetry check up to tol on the max-abs scale.
[[nodiscard]] bool is_symmetric(const Matrix& m, double tol = 1e-12);

// Positive semidefinite up to eigenvalue tolerance (symmetric input).
[[nodiscard]] bool is_psd(const Matrix& m, double tol = 1e-10);

// Eigenvalues of sigma_theta * sigma_u, descending. Both inputs must be
// symmetric PSD. Computed via the symmetric conjugate
// sigma_u^{1/2} sigma_theta sigma_u^{1/2}, which has the same spectrum
// but keeps the solver on symmetric ground (no complex detours).
[[nodiscard]] Vector product_eigenvalues(const Matrix& sigma_theta,
                                         const Matrix& sigma_u);

// Eigenvalues of a symmetric matrix, descending.
[[nodiscard]] Vector sym_eigenvalues(const Matrix& m);

// tr(m^k), k >= 1, by repeated multiplication.
[[nodiscard]] double trace_power(const Matrix& m, int k);

// Kronecker product, row-major block layout: result((i-1)p+k,(j-1)q+l)
// = a(i,j) b(k,l) in 1-based terms.
[[nodiscard]] Matrix kron(const Matrix& a, const Matrix& b);

// Symmetric PSD square root.
[[nodiscard]] Matrix sym_sqrt(const Matrix& m);

// S^{-1/2} for symmetric positive definite S. Throws std::domain_error
// when S is singular at the given eigenvalue floor. Postcondition
// checked internally: || S^{-1/2} S S^{-1/2} - I ||_max <= 1e-10.
[[nodiscard]] Matrix inverse_sqrt_sym(const Matrix& s, double min_eig = 1e-12);

}  // namespace spikecycle
