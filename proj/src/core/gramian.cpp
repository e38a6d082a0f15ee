#include "core/gramian.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>

namespace hk {

namespace {

// Taylor series variant, relatively accurate per entry for t*(1+||B||) small:
// C(t) = sum_k t^{k+1}/(k+1)! D_k with D_0 = Q, D_k = -(B D_{k-1} + D_{k-1} B*).
Matrix gramian_c_series(const ModelSpec& model, double t) {
  Matrix term = model.q;
  Matrix acc = t * term;
  double coef = t;
  for (int k = 1; k <= 16; ++k) {
    term = -(model.b * term + term * model.b.transpose()).eval();
    coef *= t / (k + 1);
    acc += coef * term;
  }
  return symmetrized(acc);
}

Matrix gramian_c_vanloan(const ModelSpec& model, double t) {
  const int n = model.n;
  Matrix h = Matrix::Zero(2 * n, 2 * n);
  h.topLeftCorner(n, n) = -model.b;
  h.topRightCorner(n, n) = model.q;
  h.bottomRightCorner(n, n) = model.b.transpose();
  const Matrix e = mat_exp(h, t);
  // top-right block equals C(t) e^{tB*}
  const Matrix c = e.topRightCorner(n, n) * mat_exp(model.b.transpose(), -t);
  return symmetrized(c);
}

double model_scale(const ModelSpec& model) {
  return 1.0 + model.b.cwiseAbs().colwise().sum().maxCoeff() +
         model.q.cwiseAbs().colwise().sum().maxCoeff();
}

// Scaling-and-squaring loses ~||tH|| * eps of accuracy, so the block
// exponential is restricted to ||tH|| <= 256; beyond that the Gramians are
// grown by the exact doubling recursions
//   W(2t) = W + E W E^T,  C(2t) = C + F C F^T,  E(2t) = E^2, F(2t) = F^2
// with E = e^{tB}, F = e^{-tB}.
struct GramianRaw {
  Matrix c;
  Matrix w;  // t K(t)
  Matrix exp_tb;
  bool c_finite = true;
};

// Nilpotent drift: the integrand of the Gramian is an exact matrix
// polynomial, so W and C have closed forms valid at every t:
//   W(t) = sum_{j,k<m} t^{j+k+1} / ((j+k+1) j! k!) B^j Q (B*)^k,
// C(t) with the extra sign (-1)^{j+k}, and e^{tB} is the terminating series.
GramianRaw gramian_raw_nilpotent(const ModelSpec& model, double t) {
  const int n = model.n;
  std::vector<Matrix> powers{Matrix::Identity(n, n)};
  while (powers.back().cwiseAbs().maxCoeff() != 0.0) powers.push_back(powers.back() * model.b);
  const int m = static_cast<int>(powers.size()) - 1;  // B^m == 0

  GramianRaw raw;
  raw.exp_tb = Matrix::Zero(n, n);
  double factorial = 1.0;
  for (int j = 0; j < m; ++j) {
    if (j > 0) factorial *= j;
    raw.exp_tb += std::pow(t, j) / factorial * powers[j];
  }
  raw.w = Matrix::Zero(n, n);
  raw.c = Matrix::Zero(n, n);
  double jfact = 1.0;
  for (int j = 0; j < m; ++j) {
    if (j > 0) jfact *= j;
    double kfact = 1.0;
    for (int k = 0; k < m; ++k) {
      if (k > 0) kfact *= k;
      const Matrix term = powers[j] * model.q * powers[k].transpose();
      const double coef = std::pow(t, j + k + 1) / ((j + k + 1) * jfact * kfact);
      raw.w += coef * term;
      raw.c += ((j + k) % 2 == 0 ? coef : -coef) * term;
    }
  }
  raw.w = symmetrized(raw.w);
  raw.c = symmetrized(raw.c);
  raw.c_finite = raw.c.allFinite();
  require(raw.w.allFinite() && raw.exp_tb.allFinite(), errc::invalid_argument,
          "gramian: t K(t) exceeds the double range at t = " + std::to_string(t));
  return raw;
}

GramianRaw gramian_raw(const ModelSpec& model, double t) {
  GramianRaw raw;
  const double scale = model_scale(model);
  if (t * scale <= 256.0) {
    raw.c = (t * scale < 0.02) ? gramian_c_series(model, t) : gramian_c_vanloan(model, t);
    raw.exp_tb = mat_exp(model.b, t);
    raw.w = symmetrized(raw.exp_tb * raw.c * raw.exp_tb.transpose());
    return raw;
  }
  if (model.b_nilpotent) return gramian_raw_nilpotent(model, t);

  // doubling recursion; for stable drifts e^{tB} contracts and the
  // accumulation is benign, and max_exp_time caps the reachable range
  int doublings = static_cast<int>(std::ceil(std::log2(t * scale / 256.0)));
  const double t0 = t / std::pow(2.0, doublings);
  raw.c = (t0 * scale < 0.02) ? gramian_c_series(model, t0) : gramian_c_vanloan(model, t0);
  raw.exp_tb = mat_exp(model.b, t0);
  Matrix f = mat_exp(model.b, -t0);
  raw.w = symmetrized(raw.exp_tb * raw.c * raw.exp_tb.transpose());
  for (int k = 0; k < doublings; ++k) {
    raw.w = symmetrized(raw.w + raw.exp_tb * raw.w * raw.exp_tb.transpose());
    if (raw.c_finite) {
      raw.c = symmetrized(raw.c + f * raw.c * f.transpose());
      raw.c_finite = raw.c.allFinite();
    }
    raw.exp_tb = raw.exp_tb * raw.exp_tb;
    if (raw.c_finite) f = f * f;
    require(raw.w.allFinite() && raw.exp_tb.allFinite(), errc::invalid_argument,
            "gramian: t K(t) exceeds the double range at t = " + std::to_string(t));
  }
  return raw;
}

}  // namespace

Matrix gramian_C(const ModelSpec& model, double t) {
  require(t > 0, errc::invalid_argument, "gramian_C: t must be positive");
  const auto raw = gramian_raw(model, t);
  require(raw.c_finite, errc::invalid_argument, "gramian_C: C(t) exceeds the double range");
  return raw.c;
}

Matrix gramian_K(const ModelSpec& model, double t) {
  require(t > 0, errc::invalid_argument, "gramian_K: t must be positive");
  // t K(t) = e^{tB} C(t) e^{tB*} inside gramian_raw
  return symmetrized(gramian_raw(model, t).w / t);
}

Matrix gramian_C_quadrature(const ModelSpec& model, double t, const QuadratureConfig& quad) {
  require(t > 0, errc::invalid_argument, "gramian_C_quadrature: t must be positive");
  const int n = model.n;
  Matrix c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      auto entry = [&](double s) {
        const Matrix e = mat_exp(model.b, -s);
        return (e * model.q * e.transpose())(i, j);
      };
      const double value = integrate_adaptive(entry, 0.0, t, quad).value;
      c(i, j) = value;
      c(j, i) = value;
    }
  }
  return c;
}

std::shared_ptr<const GramianPair> transition(const ModelSpec& model, double t) {
  require(t > 0, errc::invalid_argument, "transition: t must be positive");
  using Key = std::pair<std::uint64_t, double>;
  static std::map<Key, std::shared_ptr<const GramianPair>> cache;
  static std::shared_mutex mutex;
  const Key key{model.hash, t};
  {
    std::shared_lock lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto pair = std::make_shared<GramianPair>();
  pair->t = t;
  const auto raw = gramian_raw(model, t);
  pair->c = raw.c_finite ? raw.c : Matrix();
  pair->exp_tb = raw.exp_tb;
  pair->tk = raw.w;
  if (raw.c_finite) {
    try {
      pair->c_factor = chol_logdet_scaled(pair->c);
    } catch (const Error&) {
    }
  }
  try {
    pair->tk_factor = chol_logdet_scaled(pair->tk);
  } catch (const Error&) {
  }
  std::unique_lock lock(mutex);
  if (cache.size() > 20000) cache.clear();
  return cache.emplace(key, std::move(pair)).first->second;
}

double lyapunov_residual(const ModelSpec& model, double t) {
  require(t > 0, errc::invalid_argument, "lyapunov_residual: t must be positive");
  const Matrix emtb = mat_exp(model.b, -t);
  const Matrix c = gramian_C(model, t);
  const Matrix lhs = emtb * model.q * emtb.transpose();
  const Matrix rhs = model.q - model.b * c - c * model.b.transpose();
  return (lhs - rhs).norm() / (1.0 + model.q.norm());
}

HypoReport hypo_report(const ModelSpec& model, std::vector<double> sample_times) {
  require(!sample_times.empty(), errc::invalid_argument, "hypo_report: sample_times empty");
  for (double t : sample_times)
    require(t > 0, errc::invalid_argument, "hypo_report: sample times must be positive");

  HypoReport report;
  report.kalman_rank = kalman_rank(model.q, model.b);
  report.is_hypoelliptic = (report.kalman_rank == model.n);
  report.trace_b = model.trace_b;
  report.lp_contractive = (model.trace_b >= 0.0);
  for (double t : sample_times) {
    const Matrix k = gramian_K(model, t);
    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    report.sampled_min_eig_k.emplace_back(t, es.eigenvalues().minCoeff());
  }
  return report;
}

}  // namespace hk
