#include "core/linalg.hpp"

#include <cmath>
#include <limits>

namespace hk {

Vector SpdFactor::solve(const Vector& rhs) const {
  Vector y = chol_lower.triangularView<Eigen::Lower>().solve(rhs);
  return chol_lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix SpdFactor::solve_matrix(const Matrix& rhs) const {
  Matrix y = chol_lower.triangularView<Eigen::Lower>().solve(rhs);
  return chol_lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix SpdFactor::inverse() const {
  return solve_matrix(Matrix::Identity(matrix.rows(), matrix.cols()));
}

double SpdFactor::inv_quad_form(const Vector& v) const {
  Vector y = chol_lower.triangularView<Eigen::Lower>().solve(v);
  return y.squaredNorm();
}

SpdFactor chol_logdet(const Matrix& m) {
  const auto n = m.rows();
  require(n >= 1 && m.cols() == n, errc::invalid_argument, "chol_logdet: square matrix required");
  require(m.allFinite(), errc::invalid_argument, "chol_logdet: non-finite entries");
  const double scale = m.cwiseAbs().maxCoeff();
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, scale),
          errc::invalid_argument, "chol_logdet: matrix not symmetric");

  const double pivot_eps = 1e-14 * scale;
  Matrix l = Matrix::Zero(n, n);
  double log_det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > pivot_eps)) {
      throw Error(errc::not_positive_definite,
                  "chol_logdet: pivot " + std::to_string(j) + " not positive (" +
                      std::to_string(d) + ")");
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    log_det += 2.0 * std::log(ljj);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
    }
  }
  return SpdFactor{symmetrized(m), std::move(l), log_det};
}

SpdFactor chol_logdet_scaled(const Matrix& m) {
  const auto n = m.rows();
  Vector d(n);
  double log_scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    require(m(i, i) > 0.0, errc::not_positive_definite,
            "chol_logdet_scaled: nonpositive diagonal entry");
    d(i) = std::sqrt(m(i, i));
    log_scale += std::log(m(i, i));
  }
  Matrix normalized(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) normalized(i, j) = m(i, j) / (d(i) * d(j));
  SpdFactor factor = chol_logdet(normalized);
  factor.matrix = symmetrized(m);
  factor.chol_lower = d.asDiagonal() * factor.chol_lower;
  factor.log_det += log_scale;
  return factor;
}

bool is_spd(const Matrix& m) {
  try {
    chol_logdet(m);
    return true;
  } catch (const Error&) {
    return false;
  }
}

Matrix mat_exp(const Matrix& a, double t) {
  const auto n = a.rows();
  require(n >= 1 && a.cols() == n, errc::invalid_argument, "mat_exp: square matrix required");
  Matrix ta = t * a;
  require(ta.allFinite(), errc::invalid_argument, "mat_exp: non-finite input");

  // Pade(13,13) coefficients (Higham), theta_13 ~ 5.37
  static const double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                             1187353796428800.,  129060195264000.,   10559470521600.,
                             670442572800.,      33522128640.,       1323241920.,
                             40840800.,          960960.,            16380.,
                             182.,               1.};
  const double theta13 = 5.371920351148152;

  const double norm1 = ta.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    ta /= std::pow(2.0, squarings);
  }

  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = ta * ta;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;
  Matrix u = ta * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                   b[3] * a2 + b[1] * ident);
  Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
             b[0] * ident;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  require(r.allFinite(), errc::invalid_argument, "mat_exp: overflow (||tA|| too large)");
  return r;
}

Matrix symmetric_sqrt(const Matrix& q) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(q));
  require(es.info() == Eigen::Success, errc::internal, "symmetric_sqrt: eigensolver failed");
  Vector ev = es.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    require(ev(i) >= -1e-12 * top, errc::invalid_argument,
            "symmetric_sqrt: matrix not positive semi-definite");
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

int kalman_rank(const Matrix& q, const Matrix& b) {
  const auto n = q.rows();
  const Matrix qh = symmetric_sqrt(q);
  Matrix block(n, n * n);
  Matrix power = Matrix::Identity(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    block.middleCols(k * n, n) = power * qh;
    power = b * power;
  }
  double max_col = 0.0;
  for (Eigen::Index j = 0; j < block.cols(); ++j) max_col = std::max(max_col, block.col(j).norm());
  if (max_col == 0.0) return 0;

  Eigen::ColPivHouseholderQR<Matrix> qr(block);
  const Matrix r = qr.matrixQR().topRows(std::min(block.rows(), block.cols()));
  const double thresh = 1e-10 * max_col;
  int rank = 0;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(n, r.cols()); ++i) {
    if (std::abs(r(i, i)) > thresh) ++rank;
  }
  return rank;
}

}  // namespace hk
