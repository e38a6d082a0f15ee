#include "core/semigroup.hpp"

#include <algorithm>
#include <cmath>

namespace hk {

namespace {

struct Completion {
  Matrix a_c;
  SpdFactor a_c_factor;
  Vector mu;
  double log_pref = 0.0;  // includes the stable cross-Gaussian constant
};

// Combine N(m, Sigma) with exp(-(Y-X0)' M (Y-X0)); Sigma = 2 t K(t).
Completion complete_square(const GramianPair& pair, const GaussPolyFunction& f,
                           const Vector& x) {
  const int n = static_cast<int>(x.size());
  const SpdFactor& tk = pair.tk_spd();
  const Vector m = pair.exp_tb * x;

  Completion comp;
  const Matrix a_p = 0.25 * tk.inverse();
  comp.a_c = symmetrized(a_p + f.shape);
  comp.a_c_factor = chol_logdet_scaled(comp.a_c);
  comp.mu = comp.a_c_factor.solve(a_p * m + f.shape * f.center);

  const Vector d = m - f.center;
  // cross term: -<(2 Sigma + M^{-1})^{-1} d, d>, cancellation-free
  const Matrix cross = symmetrized(4.0 * pair.tk + f.shape_factor.inverse());
  const double c = -chol_logdet_scaled(cross).inv_quad_form(d);

  const double log_det_sigma = n * std::log(2.0) + tk.log_det;
  comp.log_pref = -0.5 * n * std::log(2.0 * M_PI) - 0.5 * log_det_sigma + c -
                  0.5 * comp.a_c_factor.log_det;
  return comp;
}

}  // namespace

double apply_Pt(const GaussPolyFunction& f, const ModelSpec& model, const Vector& x, double t,
                const QuadratureConfig& quad) {
  quad.validate();
  require(f.n == model.n, errc::invalid_argument, "apply_Pt: dimension mismatch");
  require(x.size() == model.n, errc::invalid_argument, "apply_Pt: point dimension mismatch");
  require(!f.has_phase(), errc::domain_error, "apply_Pt: modulated input not supported");
  require(t >= 0, errc::invalid_argument, "apply_Pt: t must be >= 0");
  require(model.n <= kGhMaxDim, errc::dimension_limit,
          "apply_Pt: tensorized Gauss-Hermite limited to N <= 6");
  if (t == 0.0) return f.eval(x);

  const auto pair = transition(model, t);
  const Completion comp = complete_square(*pair, f, x);
  const Matrix& l = comp.a_c_factor.chol_lower;
  const Vector shift = comp.mu - f.center;
  const GhRule& rule = gauss_hermite(quad.gh_nodes);

  Cplx s(0.0, 0.0);
  gh_tensor_foreach(rule, model.n, [&](double w, const Vector& node) {
    const Vector z = shift + l.transpose().triangularView<Eigen::Upper>().solve(node);
    s += w * f.poly.eval(z);
  });
  const Cplx value = f.amplitude * std::exp(comp.log_pref) * s;
  require(std::abs(value.imag()) <= 1e-12 * (1.0 + std::abs(value.real())), errc::domain_error,
          "apply_Pt: non-negligible imaginary part");
  return value.real();
}

double apply_Pt_gauss_exact(const GaussPolyFunction& f, const ModelSpec& model, const Vector& x,
                            double t) {
  require(f.is_pure_gaussian(), errc::invalid_argument,
          "apply_Pt_gauss_exact: input must be purely Gaussian");
  require(f.n == model.n && x.size() == model.n, errc::invalid_argument,
          "apply_Pt_gauss_exact: dimension mismatch");
  require(t >= 0, errc::invalid_argument, "apply_Pt_gauss_exact: t must be >= 0");
  const Cplx amp = f.amplitude * f.poly.terms().begin()->second;
  require(std::abs(amp.imag()) <= 1e-12 * (1.0 + std::abs(amp.real())), errc::domain_error,
          "apply_Pt_gauss_exact: complex amplitude");
  if (t == 0.0) return f.eval(x);

  const auto pair = transition(model, t);
  const Matrix sigma = 2.0 * pair->tk;
  const int n = model.n;
  const Vector d = pair->exp_tb * x - f.center;

  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) + 2.0 * sigma * f.shape);
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += std::log(std::abs(lu.matrixLU()(i, i)));

  const Matrix g = symmetrized(f.shape_factor.inverse() + 2.0 * sigma);
  const double quad_form = chol_logdet_scaled(g).inv_quad_form(d);
  return amp.real() * std::exp(-0.5 * log_det - quad_form);
}

double apply_PK(const SpaceTimeGaussPoly& u, const ModelSpec& model, const Vector& x, double t,
                double tau, const QuadratureConfig& quad) {
  require(tau >= 0, errc::invalid_argument, "apply_PK: tau must be >= 0");
  if (tau == 0.0) return u.eval(x, t);
  const GaussPolyFunction slice = u.space_slice(t - tau);
  return apply_Pt(slice, model, x, tau, quad);
}

PtDelta::PtDelta(const GaussPolyFunction& f, const ModelSpec& model)
    : f_(&f), model_(&model), af_(apply_A_exact(f, model)), a2f_(apply_A_exact(af_, model)) {}

double PtDelta::operator()(const Vector& x, double t, const QuadratureConfig& quad) const {
  if (t < tau_switch_) return t * af_.eval(x) + 0.5 * t * t * a2f_.eval(x);
  return apply_Pt(*f_, *model_, x, t, quad) - f_->eval(x);
}

double PtDelta::semigroup_value(const Vector& x, double t, const QuadratureConfig& quad) const {
  return apply_Pt(*f_, *model_, x, t, quad);
}

PkDelta::PkDelta(const SpaceTimeGaussPoly& u, const ModelSpec& model)
    : u_(&u), model_(&model), ku_(apply_K_exact(u, model)), k2u_(apply_K_exact(ku_, model)) {}

double PkDelta::operator()(const Vector& x, double t, double tau,
                           const QuadratureConfig& quad) const {
  if (tau < tau_switch_) return tau * ku_.eval(x, t) + 0.5 * tau * tau * k2u_.eval(x, t);
  return apply_PK(*u_, *model_, x, t, tau, quad) - u_->eval(x, t);
}

double PkDelta::semigroup_value(const Vector& x, double t, double tau,
                                const QuadratureConfig& quad) const {
  return apply_PK(*u_, *model_, x, t, tau, quad);
}

double max_exp_time(const ModelSpec& model) {
  // nilpotent drifts use closed-form Gramians, capped only by the double
  // range of the polynomial entries; otherwise the e-folding bound from the
  // spectral abscissa, or a conservative doubling cap on a neutral spectrum
  if (model.b_nilpotent) return 1e80;
  Eigen::EigenSolver<Matrix> es(model.b);
  const double abscissa = es.eigenvalues().real().maxCoeff();
  if (abscissa > 1e-6) return std::min(600.0 / abscissa, 1e80);
  return 1e9;
}

double resolvent_apply(const GaussPolyFunction& f, const ModelSpec& model, double lambda,
                       const Vector& x, const QuadratureConfig& quad) {
  require(lambda > 0, errc::domain_error, "resolvent_apply: requires Re(lambda) > 0");
  const double bound = f.sup_bound();

  auto integrand = [&](double t) {
    return std::exp(-lambda * t) * apply_Pt(f, model, x, t, quad);
  };
  double acc = integrate_adaptive(integrand, 0.0, 1.0, quad).value;

  const double t_cap = max_exp_time(model);
  double lo = 1.0;
  while (std::exp(-lambda * lo) * bound / lambda >= quad.tail_cut) {
    require(lo < t_cap, errc::quadrature_not_converged,
            "resolvent_apply: tail did not reach the truncation threshold");
    const double hi = std::min(2.0 * lo, t_cap);
    acc += integrate_adaptive(integrand, lo, hi, quad).value;
    lo = hi;
  }
  return acc;
}

RateReport rate_check(const GaussPolyFunction& f, const ModelSpec& model,
                      const std::vector<double>& t_grid, const std::vector<Vector>& x_grid,
                      const QuadratureConfig& quad) {
  require(!t_grid.empty() && !x_grid.empty(), errc::invalid_argument,
          "rate_check: empty grids");
  for (double t : t_grid)
    require(t > 0 && t <= 1.0, errc::invalid_argument, "rate_check: t grid must lie in (0, 1]");

  const PtDelta delta(f, model);
  const GaussPolyFunction af = apply_A_exact(f, model);
  double sup_af = 0.0;
  for (const Vector& x : x_grid) sup_af = std::max(sup_af, std::abs(af.eval(x)));

  RateReport report;
  report.all_ok = true;
  const double tolerance = 1e-6;
  std::vector<double> sorted_t = t_grid;
  std::sort(sorted_t.begin(), sorted_t.end());
  for (double t : sorted_t) {
    RateReport::Row row;
    row.t = t;
    for (const Vector& x : x_grid)
      row.sup_delta = std::max(row.sup_delta, std::abs(delta(x, t, quad)));
    // omega(t) <= max{1, e^{-tr B / p}} t with p = infinity, so the factor is 1
    row.bound = sup_af * t;
    row.margin = row.bound + tolerance - row.sup_delta;
    if (row.margin < 0) report.all_ok = false;
    report.rows.push_back(row);
  }
  if (report.rows.size() >= 2) {
    const auto& r0 = report.rows[0];
    const auto& r1 = report.rows[1];
    if (r0.sup_delta > 0 && r1.sup_delta > 0)
      report.slope_smallest =
          std::log(r1.sup_delta / r0.sup_delta) / std::log(r1.t / r0.t);
  }
  return report;
}

GaussPolyFunction pt_gauss_image(const GaussPolyFunction& f, const ModelSpec& model, double s) {
  require(f.is_pure_gaussian(), errc::invalid_argument,
          "pt_gauss_image: input must be purely Gaussian");
  require(s > 0, errc::invalid_argument, "pt_gauss_image: s must be positive");
  const auto pair = transition(model, s);
  const Matrix sigma = 2.0 * pair->tk;
  const int n = model.n;
  const Matrix g = symmetrized(f.shape_factor.inverse() + 2.0 * sigma);
  const Matrix g_inv = chol_logdet_scaled(g).inverse();
  const Matrix shape = symmetrized(pair->exp_tb.transpose() * g_inv * pair->exp_tb);
  const Vector center = pair->exp_tb.partialPivLu().solve(f.center);

  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) + 2.0 * sigma * f.shape);
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += std::log(std::abs(lu.matrixLU()(i, i)));
  const Cplx amp = f.amplitude * f.poly.terms().begin()->second * std::exp(-0.5 * log_det);
  return GaussPolyFunction::create(center, shape, Poly::constant(n, 1.0), amp, f.degree_cap);
}

SpaceTimeGaussPoly pk_gauss_image(const SpaceTimeGaussPoly& u, const ModelSpec& model,
                                  double s) {
  require(u.joint.is_pure_gaussian(), errc::invalid_argument,
          "pk_gauss_image: input must be purely Gaussian");
  const GaussPolyFunction slice0 = u.space_slice(u.joint.center(u.space_dim));
  const GaussPolyFunction image = pt_gauss_image(slice0, model, s);
  // time factor: exp(-m_t (t - s - t0)^2)
  Vector tc(1);
  tc(0) = u.joint.center(u.space_dim) + s;
  Matrix ts(1, 1);
  ts(0, 0) = u.joint.shape(u.space_dim, u.space_dim);
  const GaussPolyFunction time1d =
      GaussPolyFunction::create(tc, ts, Poly::constant(1, 1.0), 1.0, u.joint.degree_cap);
  return SpaceTimeGaussPoly::tensor(image, time1d);
}

double kernel_mass_in_y(const ModelSpec& model, const Vector& x, double t, int gh_nodes) {
  const auto pair = transition(model, t);
  const SpdFactor& tk = pair->tk_spd();
  const Vector m = pair->exp_tb * x;
  // S = 2 L with tK = L L^T maps the weight Gaussian onto the kernel's
  const Matrix s = 2.0 * tk.chol_lower;
  const double log_det_s = model.n * std::log(2.0) + 0.5 * tk.log_det;
  const GhRule& rule = gauss_hermite(gh_nodes);
  double acc = 0.0;
  gh_tensor_foreach(rule, model.n, [&](double w, const Vector& node) {
    const Vector y = m + s * node;
    acc += w * std::exp(hormander_log_kernel(model, x, y, t) + node.squaredNorm());
  });
  return acc * std::exp(log_det_s);
}

double kernel_mass_in_x(const ModelSpec& model, const Vector& y, double t, int gh_nodes) {
  const auto pair = transition(model, t);
  const SpdFactor& c = pair->c_spd();
  const Vector m = pair->exp_tb.partialPivLu().solve(y);
  const Matrix s = 2.0 * c.chol_lower;
  const double log_det_s = model.n * std::log(2.0) + 0.5 * c.log_det;
  const GhRule& rule = gauss_hermite(gh_nodes);
  double acc = 0.0;
  gh_tensor_foreach(rule, model.n, [&](double w, const Vector& node) {
    const Vector x = m + s * node;
    acc += w * std::exp(hormander_log_kernel(model, x, y, t) + node.squaredNorm());
  });
  return acc * std::exp(log_det_s);
}

}  // namespace hk
