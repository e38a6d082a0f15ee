#include "core/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace hk {

namespace {

bool is_heat_like(const ModelSpec& model) {
  return (model.q - Matrix::Identity(model.n, model.n)).cwiseAbs().maxCoeff() == 0.0 &&
         model.b.cwiseAbs().maxCoeff() == 0.0;
}

bool is_kolmogorov_2d(const ModelSpec& model) {
  if (model.n != 2) return false;
  Matrix q(2, 2), b(2, 2);
  q << 1, 0, 0, 0;
  b << 0, 0, 1, 0;
  return (model.q - q).cwiseAbs().maxCoeff() == 0.0 &&
         (model.b - b).cwiseAbs().maxCoeff() == 0.0;
}

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const int n = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(xs[i]);
    const double ly = std::log(std::max(ys[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<Vector> battery_grid(int n) {
  std::vector<Vector> grid;
  std::mt19937 rng(20250809);
  std::normal_distribution<double> dist(0.0, 0.7);
  for (int k = 0; k < 5; ++k) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = dist(rng);
    grid.push_back(x);
  }
  grid.push_back(Vector::Zero(n));
  return grid;
}

// int_0^inf g^a(z, t) dt by direct panels; equals 1
double g_profile_total_mass(double a, double z, const QuadratureConfig& quad) {
  auto f = [&](double t) { return g_profile(a, z, t); };
  const double t_min = z * z / (4.0 * (std::log(1.0 / quad.tail_cut) + 8.0));
  double acc = 0.0;
  double lo = t_min;
  const double g = 0.5 * (1.0 - a);
  const double pref = std::pow(z, 1.0 - a) / (std::pow(2.0, 1.0 - a) * std::tgamma(g));
  for (int chunk = 0; chunk < 200; ++chunk) {
    const double hi = 2.0 * lo;
    acc += integrate_adaptive(f, lo, hi, quad).value;
    lo = hi;
    if (pref * std::pow(lo, -g) / g < 1e-13) break;
  }
  return acc;
}

// int_0^inf p^a(z,.,t) weighted by zeta^a; equals 1 (Patone)
double bessel_heat_mass(double a, double z, double t, const QuadratureConfig& quad) {
  auto f = [&](double zeta) {
    return bessel_heat_kernel(a, z, zeta, t) * std::pow(zeta, a);
  };
  // graded near zero: zeta = v^{1/(1+a)} flattens the zeta^a weight
  const double p = 1.0 / (1.0 + a);
  auto near = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double zeta = std::pow(v, p);
    return p * bessel_heat_kernel(a, z, zeta, t) * std::pow(v, p * a + p - 1.0);
  };
  double acc = integrate_adaptive(near, 0.0, 1.0, quad).value;
  const double z_hi = z + std::sqrt(4.0 * t * (std::log(1.0 / quad.tail_cut) + 8.0));
  acc += integrate_adaptive(f, 1.0, z_hi, quad).value;
  return acc;
}

// reproducing identity (ckpa): int p^a(z,e,t) p^a(e,zt,s) e^a de = p^a(z,zt,t+s)
double bessel_reproducing_err(double a, double z, double zt, double t, double s,
                              const QuadratureConfig& quad) {
  auto f = [&](double eta) {
    return bessel_heat_kernel(a, z, eta, t) * bessel_heat_kernel(a, eta, zt, s) *
           std::pow(eta, a);
  };
  const double p = 1.0 / (1.0 + a);
  auto near = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double eta = std::pow(v, p);
    return p * bessel_heat_kernel(a, z, eta, t) * bessel_heat_kernel(a, eta, zt, s) *
           std::pow(v, p * a + p - 1.0);
  };
  const double tm = std::min(t, s);
  double acc = integrate_adaptive(near, 0.0, 1.0, quad).value;
  const double e_hi = std::max(z, zt) + std::sqrt(4.0 * tm * (std::log(1.0 / quad.tail_cut) + 8.0));
  acc += integrate_adaptive(f, 1.0, e_hi, quad).value;
  return rel_diff(acc, bessel_heat_kernel(a, z, zt, t + s));
}

double chapman_kolmogorov_err(const ModelSpec& model, const Vector& x, const Vector& y, double s,
                              double t, const QuadratureConfig& quad) {
  const auto pair = transition(model, s);
  const SpdFactor& tk = pair->tk_spd();
  const Matrix a1 = 0.25 * tk.inverse();
  const Vector m1 = pair->exp_tb * x;
  const auto pair2 = transition(model, t);
  const SpdFactor& tk2 = pair2->tk_spd();
  const Matrix a2 = symmetrized(0.25 * pair2->exp_tb.transpose() * tk2.inverse() * pair2->exp_tb);
  const Vector m2 = pair2->exp_tb.partialPivLu().solve(y);
  const GaussRef ref = GaussRef::product(a1, m1, a2, m2);
  const GhRule& rule = gauss_hermite(quad.gh_nodes);
  const double lhs = integrate_gauss_ref_log(ref, rule, [&](const Vector& mid) {
    return hormander_log_kernel(model, x, mid, s) + hormander_log_kernel(model, mid, y, t);
  });
  return rel_diff(lhs, hormander_kernel(model, x, y, s + t));
}

}  // namespace

GaussPolyFunction battery_function(int n) {
  return GaussPolyFunction::pure_gaussian(Vector::Zero(n), 0.5 * Matrix::Identity(n, n), 1.0);
}

SpaceTimeGaussPoly battery_spacetime(int n) {
  Vector tc = Vector::Zero(1);
  Matrix ts(1, 1);
  ts << 0.5;
  const auto time1d = GaussPolyFunction::pure_gaussian(tc, ts, 1.0);
  return SpaceTimeGaussPoly::tensor(battery_function(n), time1d);
}

Vector battery_point(int n) {
  Vector x = Vector::Zero(n);
  x(0) = 0.2;
  if (n > 1) x(1) = -0.1;
  return x;
}

SuiteReport verify_kernels(const ModelSpec& model, const QuadratureConfig& quad) {
  SuiteReport report;
  report.suite = "kernels";
  std::mt19937 rng(91);
  std::normal_distribution<double> dist(0.0, 0.6);
  auto rand_vec = [&](int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
  };

  double worst_form = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Vector x = rand_vec(model.n), y = rand_vec(model.n);
    const double t = 0.1 + 1.9 * (k + 0.5) / 50.0;
    worst_form = std::max(worst_form,
                          rel_diff(hormander_kernel(model, x, y, t, KernelForm::k_form),
                                   hormander_kernel(model, x, y, t, KernelForm::c_form)));
  }
  report.add("kform_vs_cform_rel", worst_form, 1e-10);

  double worst_ck = 0.0;
  std::uniform_real_distribution<double> tdist(0.3, 1.2);
  for (int k = 0; k < 5; ++k) {
    const Vector x = rand_vec(model.n), y = rand_vec(model.n);
    worst_ck = std::max(worst_ck,
                        chapman_kolmogorov_err(model, x, y, tdist(rng), tdist(rng), quad));
  }
  report.add("chapman_kolmogorov_rel", worst_ck, 1e-6);

  double worst_my = 0.0, worst_mx = 0.0;
  for (double t : {0.1, 1.0}) {
    const Vector x = battery_point(model.n);
    worst_my = std::max(worst_my, std::abs(kernel_mass_in_y(model, x, t, quad.gh_nodes) - 1.0));
    worst_mx = std::max(worst_mx, std::abs(kernel_mass_in_x(model, x, t, quad.gh_nodes) -
                                           std::exp(-t * model.trace_b)));
  }
  report.add("kernel_mass_in_y", worst_my, 1e-8);
  report.add("kernel_mass_in_x", worst_mx, 1e-8);

  double worst_rep = 0.0;
  for (double a : {-0.5, 0.3})
    worst_rep = std::max(worst_rep, bessel_reproducing_err(a, 1.2, 0.8, 0.5, 0.9, quad));
  report.add("bessel_reproducing_rel", worst_rep, 1e-6);

  double worst_pat = 0.0;
  for (double a : {-0.5, 0.0, 0.5})
    worst_pat = std::max(worst_pat, std::abs(bessel_heat_mass(a, 1.0, 0.7, quad) - 1.0));
  report.add("bessel_heat_mass", worst_pat, 1e-8);

  report.add("g_profile_mass", std::abs(g_profile_total_mass(0.3, 2.0, quad) - 1.0), 1e-10);

  // pointwise nonnegativity of both Poisson kernels
  double min_val = 0.0;
  for (int k = 0; k < 8; ++k) {
    const Vector x = rand_vec(model.n), y = rand_vec(model.n);
    min_val = std::min(min_val, poisson_time_kernel(model, -0.2, x, y, 0.7, 0.9));
    if (k < 3 && (x - y).norm() > 1e-3)
      min_val = std::min(min_val, poisson_space_kernel(model, -0.2, x, y, 0.9, quad));
  }
  report.add("poisson_kernels_nonnegative", -min_val, 0.0);

  {
    const Vector x = rand_vec(model.n), y = rand_vec(model.n);
    const double t = 0.8, h = 1e-5;
    const Vector grad = hormander_kernel_gradX(model, x, y, t);
    double worst = 0.0;
    for (int i = 0; i < model.n; ++i) {
      Vector xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const double fd = (hormander_kernel(model, xp, y, t) - hormander_kernel(model, xm, y, t)) /
                        (2.0 * h);
      worst = std::max(worst, rel_diff(fd, grad(i)));
    }
    report.add("gradX_vs_finite_difference", worst, 1e-6);
  }

  if (is_kolmogorov_2d(model)) {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      Vector v = rand_vec(1), xx = rand_vec(1), w = rand_vec(1), y = rand_vec(1);
      const double t = 0.2 + 1.6 * (k + 0.5) / 20.0;
      Vector big_x(2), big_y(2);
      big_x << v(0), xx(0);
      big_y << w(0), y(0);
      worst = std::max(worst, rel_diff(kolmogorov_kernel_explicit(v, xx, w, y, t, 1),
                                       hormander_kernel(model, big_x, big_y, t)));
    }
    report.add("kolmogorov_explicit_vs_general_rel", worst, 1e-8,
               "literal reading of the closed form with the mass-normalized constant "
               "c_n = (sqrt(3)/(2 pi))^n agrees with the general kernel");
  }
  return report;
}

SuiteReport verify_semigroup(const ModelSpec& model, const QuadratureConfig& quad) {
  SuiteReport report;
  report.suite = "semigroup";
  const GaussPolyFunction f = battery_function(model.n);
  const SpaceTimeGaussPoly u = battery_spacetime(model.n);
  const auto grid = battery_grid(model.n);

  double worst = 0.0;
  for (double t : {0.05, 0.5, 2.0})
    for (const auto& x : grid)
      worst = std::max(worst, rel_diff(apply_Pt(f, model, x, t, quad),
                                       apply_Pt_gauss_exact(f, model, x, t)));
  report.add("pt_vs_gauss_exact_rel", worst, 1e-10);

  report.add("pt_constant_mass",
             std::abs(kernel_mass_in_y(model, battery_point(model.n), 0.5, quad.gh_nodes) - 1.0),
             1e-10);

  if (model.trace_b >= 0.0) {
    double sup_f = 0.0, sup_ptf = 0.0;
    for (const auto& x : grid) {
      sup_f = std::max(sup_f, std::abs(f.eval(x)));
      sup_ptf = std::max(sup_ptf, std::abs(apply_Pt(f, model, x, 0.7, quad)));
    }
    report.add("linf_contraction", sup_ptf - sup_f, 1e-8);
  }

  {
    const Vector x = battery_point(model.n);
    const double t0 = 0.3, tau = 0.4, s = 0.25;
    const double composed = apply_PK(pk_gauss_image(u, model, s), model, x, t0, tau, quad);
    const double direct = apply_PK(u, model, x, t0, tau + s, quad);
    report.add("pk_semigroup_law_rel", rel_diff(composed, direct), 1e-7);
    report.add("pk_constant",
               std::abs(kernel_mass_in_y(model, x, 0.45, quad.gh_nodes) - 1.0), 1e-10);
  }

  {
    // commutation: P_t A f = d/dt P_t f
    const Vector x = battery_point(model.n);
    const double t = 0.6, h = 1e-4;
    const GaussPolyFunction af = apply_A_exact(f, model);
    const double lhs = apply_Pt(af, model, x, t, quad);
    const double rhs = (apply_Pt(f, model, x, t + h, quad) - apply_Pt(f, model, x, t - h, quad)) /
                       (2.0 * h);
    report.add("commutation_pt_generator", std::abs(lhs - rhs), 1e-6);
  }

  {
    const std::vector<double> t_grid{1e-3, 1e-2, 0.1, 1.0};
    const RateReport rate = rate_check(f, model, t_grid, grid, quad);
    double worst_margin = 0.0;
    for (const auto& row : rate.rows) worst_margin = std::min(worst_margin, row.margin);
    report.add("rate_lemma_margin", -worst_margin, 0.0);
    report.add("rate_smallest_slope", 0.95 - rate.slope_smallest, 0.0,
               "first-order rate near t = 0");
  }

  if (model.trace_b >= 0.0) {
    const Vector x = battery_point(model.n);
    const double lambda = 1.0;
    const GaussPolyFunction af = apply_A_exact(f, model);
    const double rf = resolvent_apply(f, model, lambda, x, quad);
    const double raf = resolvent_apply(af, model, lambda, x, quad);
    report.add("resolvent_identity", std::abs(lambda * rf - raf - f.eval(x)), 1e-6);

    double sup_f = 0.0, sup_rf = 0.0;
    for (const auto& xg : grid) {
      sup_f = std::max(sup_f, std::abs(f.eval(xg)));
      sup_rf = std::max(sup_rf, std::abs(resolvent_apply(f, model, lambda, xg, quad)));
    }
    report.add("resolvent_bound", sup_rf - sup_f / lambda, 1e-6);
  }

  {
    // evolutive Cauchy problem: d_tau v = K v by finite differences
    const Vector x = battery_point(model.n);
    const double t = 0.3, tau = 0.5, h = 1e-3;
    auto v = [&](const Vector& xx, double tt, double tt_tau) {
      return apply_PK(u, model, xx, tt, tt_tau, quad);
    };
    const double dtau = (v(x, t, tau + h) - v(x, t, tau - h)) / (2.0 * h);
    const double dt = (v(x, t + h, tau) - v(x, t - h, tau)) / (2.0 * h);
    Vector grad(model.n);
    Matrix hess = Matrix::Zero(model.n, model.n);
    const double f0 = v(x, t, tau);
    for (int i = 0; i < model.n; ++i) {
      Vector xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      grad(i) = (v(xp, t, tau) - v(xm, t, tau)) / (2.0 * h);
      hess(i, i) = (v(xp, t, tau) - 2.0 * f0 + v(xm, t, tau)) / (h * h);
    }
    for (int i = 0; i < model.n; ++i)
      for (int j = i + 1; j < model.n; ++j) {
        if (model.q(i, j) == 0.0) continue;
        Vector xpp = x, xpm = x, xmp = x, xmm = x;
        xpp(i) += h; xpp(j) += h;
        xpm(i) += h; xpm(j) -= h;
        xmp(i) -= h; xmp(j) += h;
        xmm(i) -= h; xmm(j) -= h;
        const double mixed =
            (v(xpp, t, tau) - v(xpm, t, tau) - v(xmp, t, tau) + v(xmm, t, tau)) / (4.0 * h * h);
        hess(i, j) = hess(j, i) = mixed;
      }
    const double kv = (model.q.array() * hess.array()).sum() + (model.b * x).dot(grad) - dt;
    const double scale = std::max({std::abs(kv), std::abs(dtau), 1e-12});
    report.add("evolutive_cauchy_residual", std::abs(dtau - kv) / scale, 1e-4);
  }
  return report;
}

SuiteReport verify_fractional(const ModelSpec& model, const QuadratureConfig& quad) {
  SuiteReport report;
  report.suite = "fractional";
  const GaussPolyFunction f = battery_function(model.n);
  const Vector x = battery_point(model.n);

  report.add("frac_of_constant", std::abs(frac_constant_probe(model, x, 0.5, quad)), 1e-10);

  {
    const auto ra = frac_A(f, model, x, 0.4, quad);
    const auto rk =
        frac_K(SpaceTimeGaussPoly::time_constant(f), model, x, 0.3, 0.4, quad);
    report.add("frac_k_time_independent_rel", rel_diff(ra.value, rk.value), 1e-8);
    const double formula = 2.0 * f.sup_bound() * std::pow(ra.tail_t, -0.4) / 0.4;
    report.add("balakrishnan_tail_formula", rel_diff(ra.tail_bound, formula), 1e-12);
  }

  {
    // maximum principle sign at the Gaussian peak
    const auto r = frac_A(f, model, Vector::Zero(model.n), 0.5, quad);
    report.add("positive_at_interior_maximum", -r.value, 0.0);
  }

  {
    QuadratureConfig fine = quad;
    fine.gh_nodes = 2 * quad.gh_nodes;
    fine.abs_tol = 0.5 * quad.abs_tol;
    fine.rel_tol = 0.5 * quad.rel_tol;
    const double base = frac_A(f, model, x, 0.3, quad).value;
    const double refined = frac_A(f, model, x, 0.3, fine).value;
    report.add("quadrature_self_consistency_rel", rel_diff(base, refined), 1e-7);
  }

  if (is_heat_like(model) && model.n <= 2) {
    double worst = 0.0;
    for (double s : {0.25, 0.5, 0.75})
      worst = std::max(worst, std::abs(frac_A(f, model, x, s, quad).value -
                                       frac_heat_oracle(f, x, s, quad)));
    report.add("fourier_oracle_agreement_abs", worst, 1e-4);
  }
  return report;
}

SuiteReport verify_extension(const ModelSpec& model, const QuadratureConfig& quad) {
  SuiteReport report;
  report.suite = "extension";
  const SpaceTimeGaussPoly u = battery_spacetime(model.n);
  const GaussPolyFunction f = battery_function(model.n);
  const Vector x = battery_point(model.n);
  const double t0 = 0.3;

  {
    double worst_dev = 0.0;
    std::ostringstream detail;
    for (double a : {-0.5, 0.3}) {
      const std::vector<double> zs{0.02, 0.04, 0.08, 0.16};
      std::vector<double> errs;
      for (double z : zs)
        errs.push_back(std::abs(extend_K_minus_u(u, model, x, t0, z, a, quad)));
      const double slope = fit_slope(zs, errs);
      worst_dev = std::max(worst_dev, std::abs(slope - (1.0 - a)));
      detail << "a=" << a << " slope=" << slope << " ";
    }
    report.add("dirichlet_trace_order_dev", worst_dev, 0.15, detail.str());
  }

  {
    double worst = 0.0;
    std::ostringstream detail;
    for (double s : {0.25, 0.5, 0.75}) {
      const double a = 1.0 - 2.0 * s;
      const double fk = frac_K(u, model, x, t0, s, quad).value;
      std::vector<double> zs, errs;
      for (int k = 0; k < 5; ++k) {
        const double z = 0.2 * std::pow(2.0, -k);
        zs.push_back(z);
        errs.push_back(std::abs(dtn_K(u, model, x, t0, s, z, quad) - fk));
      }
      const double slope = fit_slope(zs, errs);
      const double floor = std::min(1.0 - a, 1.0 + a) - 0.2;
      worst = std::max(worst, floor - slope);
      detail << "s=" << s << " order=" << slope << " ";
    }
    report.add("neumann_order_floor", worst, 0.0, detail.str());
  }

  {
    double worst = 0.0;
    for (double z : {0.3, 1.0}) {
      const double a = -0.2;
      worst = std::max(worst, rel_diff(extend_K(u, model, x, t0, z, a, quad),
                                       extend_K_direct(u, model, x, t0, z, a, quad)));
    }
    report.add("route_agreement_rel", worst, 1e-6);
  }

  if (model.trace_b >= 0.0) {
    const auto grid = battery_grid(model.n);
    double sup_u = 0.0, sup_ext = 0.0;
    for (const auto& xg : grid) {
      sup_u = std::max(sup_u, std::abs(u.eval(xg, t0)));
      sup_ext = std::max(sup_ext, std::abs(extend_K(u, model, xg, t0, 0.5, 0.1, quad)));
    }
    report.add("mean_value_bound", sup_ext - u.sup_bound(), 1e-8);
  }

  {
    // z-smoothness of U and its stability under node doubling
    QuadratureConfig fine = quad;
    fine.gh_nodes = 2 * quad.gh_nodes;
    const double a = 0.2;
    double max_curv = 0.0, max_change = 0.0;
    for (double z : {0.2, 0.7, 1.5}) {
      const double h = 0.05;
      auto curv = [&](const QuadratureConfig& q) {
        return (extend_K(u, model, x, t0, z + h, a, q) -
                2.0 * extend_K(u, model, x, t0, z, a, q) +
                extend_K(u, model, x, t0, z - h, a, q)) /
               (h * h);
      };
      const double c0 = curv(quad);
      max_curv = std::max(max_curv, std::abs(c0));
      max_change = std::max(max_change, std::abs(c0 - curv(fine)) * h * h);
    }
    report.add("z_smoothness_node_doubling", max_change, 1e-6,
               "max |d2U/dz2| = " + std::to_string(max_curv));
  }

  report.add("extension_of_constant",
             std::abs(extend_constant_probe(model, x, 0.8, -0.2, quad) - 1.0), 1e-9);
  report.add("dtn_of_constant", std::abs(dtn_constant_probe(model, x, 0.5, 0.3, quad)), 1e-9);

  report.add("time_independent_consistency_rel",
             rel_diff(extend_A(f, model, x, 0.6, 0.2, quad),
                      extend_K(SpaceTimeGaussPoly::time_constant(f), model, x, 0.0, 0.6, 0.2,
                               quad)),
             1e-7);

  {
    const Vector y_pole = Vector::Zero(model.n);
    report.add("pde_residual_poisson_time",
               pde_residual_poisson_time(model, -0.2, x, y_pole, 0.7, 0.8, 1e-3), 1e-4);
    report.add("pde_residual_extend_k",
               pde_residual_extend_K(u, model, -0.2, x, t0, 0.8, 1e-3, quad), 1e-3);
    report.add("pde_residual_extend_a",
               pde_residual_extend_A(f, model, 0.0, x, 0.8, 1e-3, quad), 1e-4);
  }
  return report;
}

std::vector<SuiteReport> verify_all(const ModelSpec& model, const QuadratureConfig& quad) {
  return {verify_kernels(model, quad), verify_semigroup(model, quad),
          verify_fractional(model, quad), verify_extension(model, quad)};
}

}  // namespace hk
