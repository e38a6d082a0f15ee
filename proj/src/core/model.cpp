#include "core/model.hpp"

#include <cstring>

namespace hk {

namespace {

std::uint64_t fnv1a(const double* data, std::size_t count, std::uint64_t h) {
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], sizeof(bits));
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace

ModelSpec ModelSpec::create(Matrix q, Matrix b) {
  const auto n = q.rows();
  require(n >= 1, errc::invalid_argument, "model: dimension must be >= 1");
  require(q.cols() == n && b.rows() == n && b.cols() == n, errc::invalid_argument,
          "model: Q and B must be square of equal order");
  require(q.allFinite() && b.allFinite(), errc::invalid_argument, "model: non-finite entries");
  const double qscale = std::max(1.0, q.cwiseAbs().maxCoeff());
  require((q - q.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * qscale, errc::invalid_argument,
          "model: Q must be symmetric (tolerance 1e-12)");
  q = symmetrized(q);

  Eigen::SelfAdjointEigenSolver<Matrix> es(q);
  require(es.info() == Eigen::Success, errc::internal, "model: eigensolver failed");
  require(es.eigenvalues().minCoeff() >= -1e-12 * qscale, errc::invalid_argument,
          "model: Q must be positive semi-definite");

  ModelSpec m;
  m.n = static_cast<int>(n);
  m.q = std::move(q);
  m.b = std::move(b);
  m.trace_b = m.b.diagonal().sum();
  Matrix power = m.b;
  for (int k = 1; k < m.n && power.cwiseAbs().maxCoeff() != 0.0; ++k) power = power * m.b;
  m.b_nilpotent = (power.cwiseAbs().maxCoeff() == 0.0);
  std::uint64_t h = 1469598103934665603ull;
  h = fnv1a(m.q.data(), static_cast<std::size_t>(m.q.size()), h);
  h = fnv1a(m.b.data(), static_cast<std::size_t>(m.b.size()), h);
  m.hash = h;
  return m;
}

ModelSpec heat_model(int n) {
  return ModelSpec::create(Matrix::Identity(n, n), Matrix::Zero(n, n));
}

ModelSpec ornstein_uhlenbeck_model(int n) {
  return ModelSpec::create(Matrix::Identity(n, n), -Matrix::Identity(n, n));
}

ModelSpec kolmogorov_model(int n) {
  const int dim = 2 * n;
  Matrix q = Matrix::Zero(dim, dim);
  q.topLeftCorner(n, n).setIdentity();
  Matrix b = Matrix::Zero(dim, dim);
  b.bottomLeftCorner(n, n).setIdentity();
  return ModelSpec::create(std::move(q), std::move(b));
}

}  // namespace hk
