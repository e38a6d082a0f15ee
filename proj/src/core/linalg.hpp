#pragma once

#include <Eigen/Dense>

#include "core/common.hpp"

namespace hk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Cholesky factorization of a symmetric positive-definite matrix together
// with its log-determinant. Pivots are checked against 1e-14 * ||M||; a
// failure signals either loss of hypoellipticity at the requested time or
// numerical degeneracy.
struct SpdFactor {
  Matrix matrix;
  Matrix chol_lower;
  double log_det = 0.0;

  Vector solve(const Vector& rhs) const;
  Matrix solve_matrix(const Matrix& rhs) const;
  Matrix inverse() const;
  // <M^{-1} v, v>
  double inv_quad_form(const Vector& v) const;
};

SpdFactor chol_logdet(const Matrix& m);
// Diagonally equilibrated variant for matrices whose entries span many
// scales (long-time covariance Gramians): factors D^{-1} M D^{-1} with
// D = sqrt(diag M) and rescales, so the pivot test is scale-invariant.
SpdFactor chol_logdet_scaled(const Matrix& m);
bool is_spd(const Matrix& m);

// exp(t*A) by scaling-and-squaring with a diagonal Pade(13,13) approximant.
Matrix mat_exp(const Matrix& a, double t = 1.0);

// Rank of [Q^{1/2} | B Q^{1/2} | ... | B^{N-1} Q^{1/2}] via column-pivoted QR
// with threshold 1e-10 * (largest column norm). Q^{1/2} comes from a
// symmetric eigendecomposition with tiny negative eigenvalues clamped to 0.
int kalman_rank(const Matrix& q, const Matrix& b);

Matrix symmetric_sqrt(const Matrix& q);

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace hk
