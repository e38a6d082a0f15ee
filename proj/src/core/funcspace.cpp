#include "core/funcspace.hpp"

#include <cmath>
#include <functional>

namespace hk {

Poly Poly::constant(int nvars, Cplx c) {
  Poly p(nvars);
  p.add_term(std::vector<int>(nvars, 0), c);
  return p;
}

Poly Poly::monomial(int nvars, const std::vector<int>& exps, Cplx c) {
  Poly p(nvars);
  require(static_cast<int>(exps.size()) == nvars, errc::invalid_argument,
          "poly: exponent arity mismatch");
  p.add_term(exps, c);
  return p;
}

int Poly::total_degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (int k : e) d += k;
    deg = std::max(deg, d);
  }
  return deg;
}

void Poly::add_term(const std::vector<int>& exps, Cplx c) {
  require(static_cast<int>(exps.size()) == nvars_, errc::invalid_argument,
          "poly: exponent arity mismatch");
  for (int k : exps)
    require(k >= 0, errc::invalid_argument, "poly: negative exponent");
  require(std::isfinite(c.real()) && std::isfinite(c.imag()), errc::invalid_argument,
          "poly: non-finite coefficient");
  auto it = terms_.find(exps);
  if (it == terms_.end()) {
    if (c != Cplx(0.0, 0.0)) terms_.emplace(exps, c);
  } else {
    it->second += c;
    if (it->second == Cplx(0.0, 0.0)) terms_.erase(it);
  }
}

Poly Poly::operator+(const Poly& other) const {
  require(nvars_ == other.nvars_, errc::invalid_argument, "poly: arity mismatch");
  Poly out = *this;
  for (const auto& [e, c] : other.terms_) out.add_term(e, c);
  return out;
}

Poly Poly::operator-(const Poly& other) const { return *this + other.scaled(-1.0); }

Poly Poly::operator*(const Poly& other) const {
  require(nvars_ == other.nvars_, errc::invalid_argument, "poly: arity mismatch");
  Poly out(nvars_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : other.terms_) {
      std::vector<int> e(nvars_);
      for (int i = 0; i < nvars_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Poly Poly::scaled(Cplx c) const {
  Poly out(nvars_);
  if (c == Cplx(0.0, 0.0)) return out;
  for (const auto& [e, coeff] : terms_) out.terms_.emplace(e, coeff * c);
  return out;
}

Poly Poly::derivative(int var) const {
  Poly out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    std::vector<int> d = e;
    d[var] -= 1;
    out.add_term(d, c * static_cast<double>(e[var]));
  }
  return out;
}

Poly Poly::times_linear(const Vector& w, Cplx c) const {
  Poly out(nvars_);
  for (const auto& [e, coeff] : terms_) {
    if (c != Cplx(0.0, 0.0)) out.add_term(e, coeff * c);
    for (int i = 0; i < nvars_; ++i) {
      if (w(i) == 0.0) continue;
      std::vector<int> up = e;
      up[i] += 1;
      out.add_term(up, coeff * w(i));
    }
  }
  return out;
}

Poly Poly::substitute_and_drop(int var, double value) const {
  Poly out(nvars_ - 1);
  for (const auto& [e, c] : terms_) {
    double factor = 1.0;
    for (int k = 0; k < e[var]; ++k) factor *= value;
    std::vector<int> reduced;
    reduced.reserve(nvars_ - 1);
    for (int i = 0; i < nvars_; ++i)
      if (i != var) reduced.push_back(e[i]);
    out.add_term(reduced, c * factor);
  }
  return out;
}

Poly Poly::conjugated() const {
  Poly out(nvars_);
  for (const auto& [e, c] : terms_) out.terms_.emplace(e, std::conj(c));
  return out;
}

Cplx Poly::eval(const Vector& z) const {
  Cplx acc(0.0, 0.0);
  for (const auto& [e, c] : terms_) {
    double mono = 1.0;
    for (int i = 0; i < nvars_; ++i) {
      const double zi = z(i);
      for (int k = 0; k < e[i]; ++k) mono *= zi;
    }
    acc += c * mono;
  }
  return acc;
}

double Poly::max_coeff_abs() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

GaussPolyFunction GaussPolyFunction::create(Vector center, Matrix shape, Poly poly,
                                            Cplx amplitude, int degree_cap) {
  GaussPolyFunction f;
  f.n = static_cast<int>(center.size());
  require(f.n >= 1, errc::invalid_argument, "gausspoly: dimension must be >= 1");
  require(shape.rows() == f.n && shape.cols() == f.n, errc::invalid_argument,
          "gausspoly: shape must be n x n");
  require(poly.nvars() == f.n, errc::invalid_argument, "gausspoly: polynomial arity mismatch");
  require(center.allFinite() && shape.allFinite(), errc::invalid_argument,
          "gausspoly: non-finite data");
  const double sscale = std::max(1.0, shape.cwiseAbs().maxCoeff());
  require((shape - shape.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * sscale,
          errc::invalid_argument, "gausspoly: shape must be symmetric (tolerance 1e-12)");
  require(std::isfinite(amplitude.real()) && std::isfinite(amplitude.imag()),
          errc::invalid_argument, "gausspoly: non-finite amplitude");
  require(degree_cap >= 0, errc::invalid_argument, "gausspoly: negative degree cap");
  require(poly.total_degree() <= degree_cap, errc::degree_overflow,
          "gausspoly: polynomial degree " + std::to_string(poly.total_degree()) +
              " exceeds cap " + std::to_string(degree_cap));

  f.center = std::move(center);
  f.shape = symmetrized(shape);
  f.shape_factor = chol_logdet(f.shape);  // throws if not SPD
  f.poly = std::move(poly);
  f.amplitude = amplitude;
  f.phase = Vector::Zero(f.n);
  f.degree_cap = degree_cap;
  f.flatten();
  return f;
}

GaussPolyFunction GaussPolyFunction::create_semidefinite(Vector center, Matrix shape, Poly poly,
                                                         Cplx amplitude, int degree_cap) {
  GaussPolyFunction f;
  f.n = static_cast<int>(center.size());
  require(f.n >= 1 && shape.rows() == f.n && shape.cols() == f.n &&
              poly.nvars() == f.n && poly.total_degree() <= degree_cap,
          errc::invalid_argument, "gausspoly: invalid semidefinite construction");
  f.center = std::move(center);
  f.shape = symmetrized(shape);
  f.poly = std::move(poly);
  f.amplitude = amplitude;
  f.phase = Vector::Zero(f.n);
  f.degree_cap = degree_cap;
  f.flatten();
  return f;
}

GaussPolyFunction GaussPolyFunction::pure_gaussian(Vector center, Matrix shape,
                                                   double amplitude) {
  const int n = static_cast<int>(center.size());
  return create(std::move(center), std::move(shape), Poly::constant(n, 1.0), amplitude);
}

bool GaussPolyFunction::is_pure_gaussian() const {
  if (poly.terms().size() != 1) return false;
  const auto& [e, c] = *poly.terms().begin();
  for (int k : e)
    if (k != 0) return false;
  return true;
}

bool GaussPolyFunction::has_phase() const { return phase.size() > 0 && phase.cwiseAbs().maxCoeff() > 0.0; }

void GaussPolyFunction::flatten() {
  flat_exps_.clear();
  flat_coeffs_.clear();
  for (const auto& [e, c] : poly.terms()) {
    flat_exps_.insert(flat_exps_.end(), e.begin(), e.end());
    flat_coeffs_.push_back(c);
  }
}

Cplx GaussPolyFunction::eval_c(const Vector& x) const {
  const Vector z = x - center;
  const double quad = z.dot(shape * z);
  Cplx acc(0.0, 0.0);
  const int* exps = flat_exps_.data();
  for (std::size_t t = 0; t < flat_coeffs_.size(); ++t, exps += n) {
    double mono = 1.0;
    for (int i = 0; i < n; ++i) {
      const double zi = z(i);
      for (int k = 0; k < exps[i]; ++k) mono *= zi;
    }
    acc += flat_coeffs_[t] * mono;
  }
  Cplx value = amplitude * acc * std::exp(-quad);
  if (has_phase()) {
    const double theta = -2.0 * M_PI * phase.dot(x);
    value *= Cplx(std::cos(theta), std::sin(theta));
  }
  return value;
}

double GaussPolyFunction::eval(const Vector& x) const {
  const Cplx v = eval_c(x);
  require(std::abs(v.imag()) <= 1e-12 * (1.0 + std::abs(v.real())), errc::domain_error,
          "gausspoly: evaluation has non-negligible imaginary part");
  return v.real();
}

Eigen::VectorXcd GaussPolyFunction::eval_grad_c(const Vector& x) const {
  const Vector z = x - center;
  const double quad = z.dot(shape * z);
  const Vector mz = shape * z;
  Cplx phase_factor(1.0, 0.0);
  if (has_phase()) {
    const double theta = -2.0 * M_PI * phase.dot(x);
    phase_factor = Cplx(std::cos(theta), std::sin(theta));
  }
  const Cplx common = amplitude * std::exp(-quad) * phase_factor;
  const Cplx value = common * poly.eval(z);

  Eigen::VectorXcd grad(n);
  for (int i = 0; i < n; ++i) {
    // d/dx_i of poly(z) e^{-<Mz,z>}: (d_i poly - 2 (Mz)_i poly)
    const Cplx dp = poly.derivative(i).eval(z) - 2.0 * mz(i) * poly.eval(z);
    grad(i) = common * dp;
    if (has_phase()) grad(i) += value * Cplx(0.0, -2.0 * M_PI * phase(i));
  }
  return grad;
}

double GaussPolyFunction::sup_bound() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(shape);
  const double lambda_min = es.eigenvalues().minCoeff();
  double bound = 0.0;
  for (const auto& [e, c] : poly.terms()) {
    double term = std::abs(c);
    for (int i = 0; i < n; ++i) {
      if (e[i] > 0) term *= std::pow(e[i] / (2.0 * M_E * lambda_min), 0.5 * e[i]);
    }
    bound += term;
  }
  return std::abs(amplitude) * bound;
}

GaussPolyFunction add(const GaussPolyFunction& f, const GaussPolyFunction& g) {
  require(f.n == g.n, errc::invalid_argument, "add: dimension mismatch");
  require((f.center - g.center).cwiseAbs().maxCoeff() == 0.0 &&
              (f.shape - g.shape).cwiseAbs().maxCoeff() <= 1e-14 &&
              (f.phase - g.phase).cwiseAbs().maxCoeff() == 0.0,
          errc::invalid_argument, "add: requires identical Gaussian factor");
  Poly combined = f.poly.scaled(f.amplitude) + g.poly.scaled(g.amplitude);
  auto out = GaussPolyFunction::create(f.center, f.shape, std::move(combined), 1.0,
                                       std::max(f.degree_cap, g.degree_cap));
  out.phase = f.phase;
  return out;
}

GaussPolyFunction apply_generator(const GaussPolyFunction& f, const Matrix& q, const Matrix& b) {
  require(!f.has_phase(), errc::domain_error, "apply_generator: modulated input not supported");
  const int n = f.n;
  require(q.rows() == n && b.rows() == n, errc::invalid_argument,
          "apply_generator: operator dimension mismatch");

  // log-gradient polynomials: g_i = d_i p - 2 (M Z)_i p
  std::vector<Poly> glog;
  glog.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Vector mrow = -2.0 * f.shape.row(i).transpose();
    glog.push_back(f.poly.derivative(i) + f.poly.times_linear(mrow, 0.0));
  }

  Poly result(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (q(i, j) == 0.0) continue;
      const Vector mrow = -2.0 * f.shape.row(j).transpose();
      Poly hij = glog[i].derivative(j) + glog[i].times_linear(mrow, 0.0);
      result = result + hij.scaled(q(i, j));
    }
  }
  // drift term: sum_i (<B_i., Z> + (B X0)_i) * g_i
  const Vector bx0 = b * f.center;
  Poly drift(n);
  for (int i = 0; i < n; ++i) {
    const Vector brow = b.row(i).transpose();
    if (brow.cwiseAbs().maxCoeff() == 0.0 && bx0(i) == 0.0) continue;
    Poly lin(n);
    lin.add_term(std::vector<int>(n, 0), bx0(i));
    for (int j = 0; j < n; ++j) {
      if (brow(j) == 0.0) continue;
      std::vector<int> e(n, 0);
      e[j] = 1;
      lin.add_term(e, brow(j));
    }
    drift = drift + (lin * glog[i]);
  }
  result = result + drift;

  require(result.total_degree() <= f.degree_cap, errc::degree_overflow,
          "apply_generator: degree cap exceeded");
  if (!f.has_spd_factor())
    return GaussPolyFunction::create_semidefinite(f.center, f.shape, std::move(result),
                                                  f.amplitude, f.degree_cap);
  return GaussPolyFunction::create(f.center, f.shape, std::move(result), f.amplitude,
                                   f.degree_cap);
}

GaussPolyFunction apply_A_exact(const GaussPolyFunction& f, const ModelSpec& model) {
  require(f.n == model.n, errc::invalid_argument, "apply_A_exact: dimension mismatch");
  return apply_generator(f, model.q, model.b);
}

GaussPolyFunction fourier_exact(const GaussPolyFunction& f) {
  const int n = f.n;
  const Matrix w = symmetrized(M_PI * M_PI * f.shape_factor.inverse());
  const double log_c0 = 0.5 * n * std::log(M_PI) - 0.5 * f.shape_factor.log_det;

  // apply prod_j ((i/2pi)(d_j - 2 (W xi)_j))^{alpha_j} to 1 for each monomial
  Poly q_total(n);
  for (const auto& [alpha, coeff] : f.poly.terms()) {
    Poly cur = Poly::constant(n, 1.0);
    for (int j = 0; j < n; ++j) {
      const Vector wrow = -2.0 * w.row(j).transpose();
      for (int rep = 0; rep < alpha[j]; ++rep) {
        cur = (cur.derivative(j) + cur.times_linear(wrow, 0.0)).scaled(Cplx(0.0, 1.0 / (2.0 * M_PI)));
      }
    }
    q_total = q_total + cur.scaled(coeff);
  }

  Cplx amp = f.amplitude * std::exp(log_c0);
  Vector new_center = Vector::Zero(n);
  Vector new_phase = f.center;
  if (f.has_phase()) {
    new_center = -f.phase;
    const double theta = -2.0 * M_PI * f.center.dot(f.phase);
    amp *= Cplx(std::cos(theta), std::sin(theta));
  }
  auto out = GaussPolyFunction::create(new_center, w, std::move(q_total), amp, f.degree_cap);
  out.phase = new_phase;
  return out;
}

double gaussian_moment(const Matrix& cov, const std::vector<int>& alpha) {
  const int n = static_cast<int>(cov.rows());
  std::map<std::vector<int>, double> memo;
  std::function<double(const std::vector<int>&)> rec = [&](const std::vector<int>& a) -> double {
    int total = 0;
    for (int k : a) total += k;
    if (total == 0) return 1.0;
    if (total % 2 == 1) return 0.0;
    auto it = memo.find(a);
    if (it != memo.end()) return it->second;
    int i = 0;
    while (a[i] == 0) ++i;
    std::vector<int> beta = a;
    beta[i] -= 1;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (beta[j] == 0 || cov(i, j) == 0.0) continue;
      std::vector<int> gamma = beta;
      gamma[j] -= 1;
      acc += cov(i, j) * beta[j] * rec(gamma);
    }
    memo.emplace(a, acc);
    return acc;
  };
  return rec(alpha);
}

Cplx integral(const GaussPolyFunction& f) {
  require(!f.has_phase(), errc::domain_error, "integral: modulated input not supported");
  const Matrix cov = 0.5 * f.shape_factor.inverse();  // (2M)^{-1}
  const double pref = std::exp(0.5 * f.n * std::log(M_PI) - 0.5 * f.shape_factor.log_det);
  Cplx acc(0.0, 0.0);
  for (const auto& [e, c] : f.poly.terms()) acc += c * gaussian_moment(cov, e);
  return f.amplitude * pref * acc;
}

double l2_norm(const GaussPolyFunction& f) {
  // |f|^2 = |amp|^2 * p * conj(p) * exp(-2 Z' M Z); the phase is unimodular
  const Poly sq = f.poly * f.poly.conjugated();
  const Matrix m2 = 2.0 * f.shape;
  const SpdFactor m2f = chol_logdet(m2);
  const Matrix cov = 0.5 * m2f.inverse();
  const double pref = std::exp(0.5 * f.n * std::log(M_PI) - 0.5 * m2f.log_det);
  Cplx acc(0.0, 0.0);
  for (const auto& [e, c] : sq.terms()) acc += c * gaussian_moment(cov, e);
  const double value = std::norm(f.amplitude) * pref * acc.real();
  return std::sqrt(std::max(value, 0.0));
}

SpaceTimeGaussPoly SpaceTimeGaussPoly::tensor(const GaussPolyFunction& space,
                                              const GaussPolyFunction& time1d) {
  require(time1d.n == 1, errc::invalid_argument, "spacetime: time factor must be 1-D");
  require(!space.has_phase() && !time1d.has_phase(), errc::domain_error,
          "spacetime: modulated factors not supported");
  const int ns = space.n;
  const int n = ns + 1;
  Vector center(n);
  center.head(ns) = space.center;
  center(ns) = time1d.center(0);
  Matrix shape = Matrix::Zero(n, n);
  shape.topLeftCorner(ns, ns) = space.shape;
  shape(ns, ns) = time1d.shape(0, 0);

  Poly joint_poly(n);
  for (const auto& [es, cs] : space.poly.terms()) {
    for (const auto& [et, ct] : time1d.poly.terms()) {
      std::vector<int> e(es);
      e.push_back(et[0]);
      joint_poly.add_term(e, cs * ct);
    }
  }
  SpaceTimeGaussPoly u;
  u.joint = GaussPolyFunction::create(std::move(center), std::move(shape), std::move(joint_poly),
                                      space.amplitude * time1d.amplitude,
                                      std::max(space.degree_cap, time1d.degree_cap));
  u.space_dim = ns;
  return u;
}

SpaceTimeGaussPoly SpaceTimeGaussPoly::time_constant(const GaussPolyFunction& space) {
  require(!space.has_phase(), errc::domain_error,
          "spacetime: modulated factors not supported");
  const int ns = space.n;
  const int n = ns + 1;
  Vector center(n);
  center.head(ns) = space.center;
  center(ns) = 0.0;
  Matrix shape = Matrix::Zero(n, n);
  shape.topLeftCorner(ns, ns) = space.shape;
  Poly joint_poly(n);
  for (const auto& [es, cs] : space.poly.terms()) {
    std::vector<int> e(es);
    e.push_back(0);
    joint_poly.add_term(e, cs);
  }
  SpaceTimeGaussPoly u;
  u.joint = GaussPolyFunction::create_semidefinite(std::move(center), std::move(shape),
                                                   std::move(joint_poly), space.amplitude,
                                                   space.degree_cap);
  u.space_dim = ns;
  u.time_constant_flag = true;
  return u;
}

GaussPolyFunction SpaceTimeGaussPoly::space_slice(double t) const {
  const int ns = space_dim;
  const double zt = t - joint.center(ns);
  const double mt = joint.shape(ns, ns);
  Poly sliced = joint.poly.substitute_and_drop(ns, zt);
  const Cplx amp = joint.amplitude * std::exp(-mt * zt * zt);
  return GaussPolyFunction::create(joint.center.head(ns), joint.shape.topLeftCorner(ns, ns),
                                   std::move(sliced), amp, joint.degree_cap);
}

double SpaceTimeGaussPoly::sup_bound() const {
  if (time_constant_flag) return space_slice(joint.center(space_dim)).sup_bound();
  return joint.sup_bound();
}

double SpaceTimeGaussPoly::eval(const Vector& x, double t) const {
  Vector xt(space_dim + 1);
  xt.head(space_dim) = x;
  xt(space_dim) = t;
  return joint.eval(xt);
}

SpaceTimeGaussPoly apply_K_exact(const SpaceTimeGaussPoly& u, const ModelSpec& model) {
  require(u.space_dim == model.n, errc::invalid_argument, "apply_K_exact: dimension mismatch");
  const int n = u.space_dim + 1;
  Matrix qe = Matrix::Zero(n, n);
  qe.topLeftCorner(model.n, model.n) = model.q;
  Matrix be = Matrix::Zero(n, n);
  be.topLeftCorner(model.n, model.n) = model.b;
  GaussPolyFunction a_part = apply_generator(u.joint, qe, be);

  // d_t term: g_t = d_t p - 2 (M Z)_t p on the joint representation
  const Vector mrow = -2.0 * u.joint.shape.row(n - 1).transpose();
  Poly dt = u.joint.poly.derivative(n - 1) + u.joint.poly.times_linear(mrow, 0.0);
  Poly combined = a_part.poly - dt;
  require(combined.total_degree() <= u.joint.degree_cap, errc::degree_overflow,
          "apply_K_exact: degree cap exceeded");

  SpaceTimeGaussPoly out;
  if (u.joint.has_spd_factor()) {
    out.joint = GaussPolyFunction::create(u.joint.center, u.joint.shape, std::move(combined),
                                          u.joint.amplitude, u.joint.degree_cap);
  } else {
    out.joint = GaussPolyFunction::create_semidefinite(u.joint.center, u.joint.shape,
                                                       std::move(combined), u.joint.amplitude,
                                                       u.joint.degree_cap);
  }
  out.space_dim = u.space_dim;
  out.time_constant_flag = u.time_constant_flag;
  return out;
}

}  // namespace hk
