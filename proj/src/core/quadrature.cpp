#include "core/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <queue>

namespace hk {

namespace {

// QUADPACK QK15 abscissae/weights on [-1, 1].
const double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                        0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double result_gauss = 0.0;
  double result_kronrod = kWgk[7] * fc;
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    result_kronrod += kWgk[j] * (fv1[j] + fv2[j]);
  }
  for (int j = 0; j < 3; ++j) result_gauss += kWg[j] * (fv1[2 * j + 1] + fv2[2 * j + 1]);
  result_gauss += kWg[3] * fc;

  const double value = result_kronrod * half;
  double err = std::abs((result_kronrod - result_gauss) * half);
  // QUADPACK-style rescaling of the raw error estimate
  double resabs = kWgk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
  resabs *= std::abs(half);
  const double mean = result_kronrod * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
  resasc *= std::abs(half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double round_err = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  err = std::max(err, round_err);
  return Panel{a, b, value, err};
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol, int max_subdiv) {
  if (a == b) return {0.0, 0.0, 0};
  std::priority_queue<Panel> panels;
  Panel first = eval_panel(f, a, b);
  double total = first.value;
  double total_err = first.error;
  panels.push(first);
  int subdivisions = 1;

  auto tolerance = [&]() { return std::max(abs_tol, rel_tol * std::abs(total)); };

  while (total_err > tolerance()) {
    if (subdivisions >= max_subdiv) {
      throw Error(errc::quadrature_not_converged,
                  "integrate_adaptive: subdivision budget exhausted (error " +
                      std::to_string(total_err) + ")");
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval at roundoff resolution; accept the current estimate
      panels.push(worst);
      break;
    }
    Panel left = eval_panel(f, worst.a, mid);
    Panel right = eval_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }
  require(std::isfinite(total), errc::quadrature_not_converged,
          "integrate_adaptive: non-finite integral");
  return {total, total_err, subdivisions};
}

const GhRule& gauss_hermite(int n) {
  require(n >= 2, errc::invalid_argument, "gauss_hermite: need at least 2 nodes");
  require(n <= 512, errc::invalid_argument, "gauss_hermite: node count too large");
  static std::map<int, GhRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  // Golub-Welsch: Jacobi matrix for Hermite polynomials, weight e^{-x^2}
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(0.5 * k);
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(jacobi);
  require(es.info() == Eigen::Success, errc::internal, "gauss_hermite: eigensolver failed");
  GhRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  const double mu0 = std::sqrt(M_PI);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.weights(i) = mu0 * v0 * v0;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double integrate_gauss_ref_log(const GaussRef& ref, const GhRule& rule,
                               const std::function<double(const Vector&)>& log_f) {
  const int dim = static_cast<int>(ref.mu.size());
  const Matrix& l = ref.a_factor.chol_lower;
  double acc = 0.0;
  gh_tensor_foreach(rule, dim, [&](double w, const Vector& node) {
    const Vector y = ref.mu + l.transpose().triangularView<Eigen::Upper>().solve(node);
    const double lf = log_f(y);
    if (std::isfinite(lf)) acc += w * std::exp(lf + node.squaredNorm());
  });
  return acc * std::exp(-0.5 * ref.a_factor.log_det);
}

double integrate_gauss_ref(const GaussRef& ref, const GhRule& rule,
                           const std::function<double(const Vector&)>& f) {
  const int dim = static_cast<int>(ref.mu.size());
  const Matrix& l = ref.a_factor.chol_lower;
  double acc = 0.0;
  gh_tensor_foreach(rule, dim, [&](double w, const Vector& node) {
    const Vector y = ref.mu + l.transpose().triangularView<Eigen::Upper>().solve(node);
    const double fy = f(y);
    if (fy != 0.0) acc += w * fy * std::exp(node.squaredNorm());
  });
  return acc * std::exp(-0.5 * ref.a_factor.log_det);
}

void gh_tensor_foreach(const GhRule& rule, int dim,
                       const std::function<void(double, const Vector&)>& fn) {
  require(dim >= 1, errc::invalid_argument, "gh_tensor_foreach: dim must be >= 1");
  require(dim <= kGhMaxDim, errc::dimension_limit,
          "gh_tensor_foreach: tensorized Gauss-Hermite limited to dimension " +
              std::to_string(kGhMaxDim));
  const int n = static_cast<int>(rule.nodes.size());
  std::vector<int> idx(dim, 0);
  Vector point(dim);
  for (;;) {
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      w *= rule.weights(idx[d]);
      point(d) = rule.nodes(idx[d]);
    }
    fn(w, point);
    int d = 0;
    while (d < dim && ++idx[d] == n) {
      idx[d] = 0;
      ++d;
    }
    if (d == dim) break;
  }
}

}  // namespace hk
