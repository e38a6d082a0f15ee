#include "core/extension.hpp"

#include <cmath>
#include <limits>

namespace hk {

namespace {

// unnormalized lower incomplete gamma for small x
double lower_inc_gamma(double g, double x) {
  if (x <= 0.0) return 0.0;
  double term = 1.0 / g;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= x / (g + k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::pow(x, g) * std::exp(-x) * sum;
}

// int_0^inf u^{g-1} e^{-u} F(u) du. Below u_lo (mapped times beyond the safe
// matrix-exponential range) F is frozen at `frozen`; the weight mass there is
// added in closed form.
double gamma_weighted_integral(double g, const std::function<double(double)>& f, double u_lo,
                               double frozen, const QuadratureConfig& quad) {
  double acc = 0.0;
  if (u_lo > 0.0) acc += frozen * lower_inc_gamma(g, u_lo);

  const double v_lo = std::pow(u_lo, g);
  if (g < 1.0) {
    // graded substitution u = v^{1/g} flattens the u^{g-1} endpoint
    auto near = [&](double v) {
      if (v <= 0.0) return 0.0;
      const double u = std::pow(v, 1.0 / g);
      return (1.0 / g) * std::exp(-u) * f(u);
    };
    acc += integrate_adaptive(near, std::min(v_lo, 1.0), 1.0, quad).value;
  } else {
    auto near = [&](double u) { return std::pow(u, g - 1.0) * std::exp(-u) * f(u); };
    acc += integrate_adaptive(near, std::min(u_lo, 1.0), 1.0, quad).value;
  }
  const double u_hi = -std::log(quad.tail_cut) + 8.0;
  auto far = [&](double u) { return std::pow(u, g - 1.0) * std::exp(-u) * f(u); };
  acc += integrate_adaptive(far, 1.0, u_hi, quad).value;
  return acc;
}

struct MappedTimes {
  double u_lo = 0.0;      // below this u the time z^2/(4u) exceeds the cap
  double tau_cap = 0.0;   // capped time used for the frozen value
};

MappedTimes mapped_times(const ModelSpec& model, double z) {
  MappedTimes m;
  m.tau_cap = max_exp_time(model);
  m.u_lo = z * z / (4.0 * m.tau_cap);
  if (m.u_lo < 1e-280) m.u_lo = 0.0;
  return m;
}

}  // namespace

double extend_K_minus_u(const SpaceTimeGaussPoly& u, const ModelSpec& model, const Vector& x,
                        double t, double z, double a, const QuadratureConfig& quad) {
  FractionalParams::from_a(a);
  quad.validate();
  require(z >= 0, errc::invalid_argument, "extend_K: z must be >= 0");
  if (z == 0.0) return 0.0;
  const double g = 0.5 * (1.0 - a);
  const PkDelta delta(u, model);
  const auto mt = mapped_times(model, z);
  const double frozen =
      mt.u_lo > 0.0 ? delta(x, t, mt.tau_cap, quad) : 0.0;
  auto f = [&](double uu) { return delta(x, t, z * z / (4.0 * uu), quad); };
  return gamma_weighted_integral(g, f, mt.u_lo, frozen, quad) / std::tgamma(g);
}

double extend_K(const SpaceTimeGaussPoly& u, const ModelSpec& model, const Vector& x, double t,
                double z, double a, const QuadratureConfig& quad) {
  if (z == 0.0) return u.eval(x, t);
  return u.eval(x, t) + extend_K_minus_u(u, model, x, t, z, a, quad);
}

double extend_K_direct(const SpaceTimeGaussPoly& u, const ModelSpec& model, const Vector& x,
                       double t, double z, double a, const QuadratureConfig& quad) {
  FractionalParams::from_a(a);
  require(z > 0, errc::invalid_argument, "extend_K_direct: z must be positive");
  const GhRule& rule = gauss_hermite(quad.gh_nodes);

  auto inner = [&](double tau) {
    const auto pair = transition(model, tau);
    const SpdFactor& tk = pair->tk_spd();
    const Matrix a_p = 0.25 * tk.inverse();
    const Vector m = pair->exp_tb * x;
    const GaussPolyFunction slice = u.space_slice(t - tau);
    const GaussRef ref = GaussRef::product(a_p, m, slice.shape, slice.center);
    return integrate_gauss_ref(ref, rule, [&](const Vector& y) {
      return poisson_time_kernel(model, a, x, y, tau, z) * u.eval(y, t - tau);
    });
  };

  // log-time panels; the e^{-z^2/4 tau} factor kills the left end
  const double tau_min = z * z / (4.0 * (std::log(1.0 / quad.tail_cut) + 8.0));
  auto in_v = [&](double v) {
    const double tau = std::exp(v);
    return tau * inner(tau);
  };
  double acc = 0.0;
  double v_lo = std::log(tau_min);
  const double v_cap = std::log(max_exp_time(model));
  const double g = 0.5 * (1.0 - a);
  double remainder_prev = std::numeric_limits<double>::infinity();
  for (int chunk = 0; chunk < 200; ++chunk) {
    const double v_hi = std::min(v_lo + 2.0, v_cap);
    acc += integrate_adaptive(in_v, v_lo, v_hi, quad).value;
    v_lo = v_hi;
    const double tau = std::exp(v_lo);
    // analytic remainder: the semigroup part of the integrand frozen at tau
    // times the remaining g^a mass (lower incomplete gamma in u = z^2/4tau)
    const double tail_mass = lower_inc_gamma(g, z * z / (4.0 * tau)) / std::tgamma(g);
    const double semigroup_part = inner(tau) / g_profile(a, z, tau);
    const double remainder = semigroup_part * tail_mass;
    if (tau > 4.0 * std::max(1.0, z * z) &&
        std::abs(remainder - remainder_prev) < 0.5 * quad.abs_tol) {
      acc += remainder;
      break;
    }
    remainder_prev = remainder;
    require(v_lo < v_cap, errc::quadrature_not_converged,
            "extend_K_direct: time integral did not converge");
  }
  return acc;
}

double extend_A(const GaussPolyFunction& phi, const ModelSpec& model, const Vector& x, double z,
                double a, const QuadratureConfig& quad) {
  FractionalParams::from_a(a);
  quad.validate();
  require(z >= 0, errc::invalid_argument, "extend_A: z must be >= 0");
  if (z == 0.0) return phi.eval(x);
  const double g = 0.5 * (1.0 - a);
  const auto mt = mapped_times(model, z);
  const double frozen = mt.u_lo > 0.0 ? apply_Pt(phi, model, x, mt.tau_cap, quad) : 0.0;
  auto f = [&](double uu) { return apply_Pt(phi, model, x, z * z / (4.0 * uu), quad); };
  return gamma_weighted_integral(g, f, mt.u_lo, frozen, quad) / std::tgamma(g);
}

double dtn_K(const SpaceTimeGaussPoly& u, const ModelSpec& model, const Vector& x, double t,
             double s, double z, const QuadratureConfig& quad) {
  const auto params = FractionalParams::from_s(s);
  quad.validate();
  require(z > 0, errc::invalid_argument, "dtn_K: z must be positive");
  const double a = params.a;
  const double g = 0.5 * (1.0 - a);  // = s
  const double gamma_plus = std::tgamma(0.5 * (1.0 + a));

  const PkDelta delta(u, model);
  const auto mt = mapped_times(model, z);
  const double frozen = mt.u_lo > 0.0 ? delta(x, t, mt.tau_cap, quad) : 0.0;
  auto f = [&](double uu) { return delta(x, t, z * z / (4.0 * uu), quad); };

  const double w1 = gamma_weighted_integral(g, f, mt.u_lo, frozen, quad);
  const double w2 = gamma_weighted_integral(g + 1.0, f, mt.u_lo, frozen, quad);
  const double scale = std::pow(4.0 / (z * z), g);
  return scale * (-(1.0 - a) / (2.0 * gamma_plus) * w1 + w2 / gamma_plus);
}

double pde_residual(const std::function<double(const Vector&, double, double)>& field,
                    const ModelSpec& model, double a, const Vector& x, double t, double z,
                    double h_rel, bool has_time) {
  require(z > 0, errc::invalid_argument, "pde_residual: interior point required (z > 0)");
  require(h_rel > 0, errc::invalid_argument, "pde_residual: step must be positive");
  const int n = model.n;

  auto at = [&](const Vector& xx, double tt, double zz) { return field(xx, tt, zz); };
  const double f0 = at(x, t, z);

  // tr(Q D^2) + <BX, grad>
  Vector h(n);
  for (int i = 0; i < n; ++i) h(i) = h_rel * std::max(1.0, std::abs(x(i)));
  Vector grad(n);
  Matrix hess = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Vector xp = x, xm = x;
    xp(i) += h(i);
    xm(i) -= h(i);
    const double fp = at(xp, t, z);
    const double fm = at(xm, t, z);
    grad(i) = (fp - fm) / (2.0 * h(i));
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h(i) * h(i));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (model.q(i, j) == 0.0) continue;
      Vector xpp = x, xpm = x, xmp = x, xmm = x;
      xpp(i) += h(i); xpp(j) += h(j);
      xpm(i) += h(i); xpm(j) -= h(j);
      xmp(i) -= h(i); xmp(j) += h(j);
      xmm(i) -= h(i); xmm(j) -= h(j);
      const double mixed =
          (at(xpp, t, z) - at(xpm, t, z) - at(xmp, t, z) + at(xmm, t, z)) /
          (4.0 * h(i) * h(j));
      hess(i, j) = mixed;
      hess(j, i) = mixed;
    }
  }
  const double a_term = (model.q.array() * hess.array()).sum() + (model.b * x).dot(grad);

  const double hz = h_rel * std::max(0.25, std::abs(z));
  const double fzp = at(x, t, z + hz);
  const double fzm = at(x, t, z - hz);
  const double bz_term =
      (fzp - 2.0 * f0 + fzm) / (hz * hz) + (a / z) * (fzp - fzm) / (2.0 * hz);

  double dt_term = 0.0;
  if (has_time) {
    const double ht = h_rel * std::max(1.0, std::abs(t));
    dt_term = (at(x, t + ht, z) - at(x, t - ht, z)) / (2.0 * ht);
  }

  const double residual = a_term + bz_term - dt_term;
  const double scale = std::max({std::abs(a_term), std::abs(bz_term), std::abs(dt_term), 1e-30});
  return std::abs(residual) / scale;
}

double pde_residual_poisson_time(const ModelSpec& model, double a, const Vector& x,
                                 const Vector& y_pole, double t, double z, double h_rel) {
  auto field = [&](const Vector& xx, double tt, double zz) {
    return poisson_time_kernel(model, a, xx, y_pole, tt, zz);
  };
  return pde_residual(field, model, a, x, t, z, h_rel, /*has_time=*/true);
}

double pde_residual_extend_K(const SpaceTimeGaussPoly& u, const ModelSpec& model, double a,
                             const Vector& x, double t, double z, double h_rel,
                             const QuadratureConfig& quad) {
  auto field = [&](const Vector& xx, double tt, double zz) {
    return extend_K(u, model, xx, tt, zz, a, quad);
  };
  return pde_residual(field, model, a, x, t, z, h_rel, /*has_time=*/true);
}

double pde_residual_extend_A(const GaussPolyFunction& phi, const ModelSpec& model, double a,
                             const Vector& x, double z, double h_rel,
                             const QuadratureConfig& quad) {
  auto field = [&](const Vector& xx, double, double zz) {
    return extend_A(phi, model, xx, zz, a, quad);
  };
  return pde_residual(field, model, a, x, 0.0, z, h_rel, /*has_time=*/false);
}

double extend_constant_probe(const ModelSpec& model, const Vector& x, double z, double a,
                             const QuadratureConfig& quad) {
  FractionalParams::from_a(a);
  require(z > 0, errc::invalid_argument, "extend_constant_probe: z must be positive");
  const double g = 0.5 * (1.0 - a);
  const auto mt = mapped_times(model, z);
  auto f = [&](double uu) {
    return kernel_mass_in_y(model, x, z * z / (4.0 * uu), quad.gh_nodes);
  };
  const double frozen = mt.u_lo > 0.0 ? f(mt.u_lo) : 0.0;
  return gamma_weighted_integral(g, f, mt.u_lo, frozen, quad) / std::tgamma(g);
}

double dtn_constant_probe(const ModelSpec& model, const Vector& x, double s, double z,
                          const QuadratureConfig& quad) {
  const auto params = FractionalParams::from_s(s);
  require(z > 0, errc::invalid_argument, "dtn_constant_probe: z must be positive");
  const double a = params.a;
  const double g = 0.5 * (1.0 - a);
  const double gamma_plus = std::tgamma(0.5 * (1.0 + a));
  auto f = [&](double uu) {
    return kernel_mass_in_y(model, x, z * z / (4.0 * uu), quad.gh_nodes) - 1.0;
  };
  const double w1 = gamma_weighted_integral(g, f, 0.0, 0.0, quad);
  const double w2 = gamma_weighted_integral(g + 1.0, f, 0.0, 0.0, quad);
  const double scale = std::pow(4.0 / (z * z), g);
  return scale * (-(1.0 - a) / (2.0 * gamma_plus) * w1 + w2 / gamma_plus);
}

}  // namespace hk
