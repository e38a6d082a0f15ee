#include "core/kernels.hpp"

#include <cmath>
#include <limits>

namespace hk {

namespace {
const double kLog4Pi = std::log(4.0 * M_PI);
}

double hormander_log_kernel(const ModelSpec& model, const Vector& x, const Vector& y, double t,
                            KernelForm form) {
  require(t > 0, errc::invalid_argument, "hormander_kernel: t must be positive");
  require(x.size() == model.n && y.size() == model.n, errc::invalid_argument,
          "hormander_kernel: point dimension mismatch");
  const auto pair = transition(model, t);
  if (form == KernelForm::k_form) {
    const SpdFactor& tk = pair->tk_spd();
    const Vector d = y - pair->exp_tb * x;
    return -0.5 * model.n * kLog4Pi - 0.5 * tk.log_det - 0.25 * tk.inv_quad_form(d);
  }
  const SpdFactor& c = pair->c_spd();
  const Vector e = x - pair->exp_tb.partialPivLu().solve(y);
  return -0.5 * model.n * kLog4Pi - t * model.trace_b - 0.5 * c.log_det -
         0.25 * c.inv_quad_form(e);
}

double hormander_kernel(const ModelSpec& model, const Vector& x, const Vector& y, double t,
                        KernelForm form) {
  return std::exp(hormander_log_kernel(model, x, y, t, form));
}

Vector hormander_kernel_gradX(const ModelSpec& model, const Vector& x, const Vector& y,
                              double t) {
  const auto pair = transition(model, t);
  const SpdFactor& c = pair->c_spd();
  const Vector e = x - pair->exp_tb.partialPivLu().solve(y);
  const double p = hormander_kernel(model, x, y, t, KernelForm::c_form);
  return -0.5 * p * c.solve(e);
}

double kolmogorov_kernel_explicit(const Vector& v, const Vector& x, const Vector& w,
                                  const Vector& y, double t, int n) {
  require(n >= 1, errc::invalid_argument, "kolmogorov_kernel: n must be >= 1");
  require(t > 0, errc::invalid_argument, "kolmogorov_kernel: t must be positive");
  require(v.size() == n && x.size() == n && w.size() == n && y.size() == n,
          errc::invalid_argument, "kolmogorov_kernel: vectors must have length n");
  // mass-1 normalization fixes c_n = (sqrt(3)/(2 pi))^n
  const double log_cn = n * (0.5 * std::log(3.0) - std::log(2.0 * M_PI));
  const Vector dv = v - w;
  const Vector dx = y - x - t * v;
  const double exponent =
      (dv.squaredNorm() + (3.0 / t) * dv.dot(dx) + (3.0 / (t * t)) * dx.squaredNorm()) / t;
  return std::exp(log_cn - 2.0 * n * std::log(t) - exponent);
}

double bessel_i_scaled(double nu, double x) {
  require(nu > -1.0, errc::domain_error, "bessel_i: order must be > -1");
  require(x >= 0.0, errc::domain_error, "bessel_i: argument must be >= 0");
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  if (x <= 30.0) {
    // ascending series, all terms positive
    const double lp = nu * std::log(0.5 * x) - x - std::lgamma(nu + 1.0);
    double term = 1.0;
    double sum = 1.0;
    const double q = 0.25 * x * x;
    for (int k = 1; k <= 500; ++k) {
      term *= q / (k * (nu + k));
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return std::exp(lp) * sum;
  }
  // large-argument asymptotic expansion; the e^{-2x} reflection term is
  // below double precision for x > 30
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < 40; ++k) {
    const double next = term * -(mu - (2.0 * k + 1.0) * (2.0 * k + 1.0)) / (8.0 * (k + 1) * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * M_PI * x);
}

double bessel_i(double nu, double x) { return bessel_i_scaled(nu, x) * std::exp(x); }

double bessel_heat_kernel(double a, double z, double zeta, double t) {
  FractionalParams::from_a(a);
  require(t > 0, errc::invalid_argument, "bessel_heat_kernel: t must be positive");
  require(z >= 0 && zeta >= 0, errc::invalid_argument,
          "bessel_heat_kernel: z and zeta must be >= 0");
  const double w = z * zeta / (2.0 * t);
  if (w == 0.0) {
    // series limit: leading Bessel term
    const double zz = z * z + zeta * zeta;
    return std::exp(-a * std::log(2.0) - 0.5 * (a + 1.0) * std::log(t) -
                    std::lgamma(0.5 * (a + 1.0)) - zz / (4.0 * t));
  }
  const double nu = 0.5 * (a - 1.0);
  const double iscaled = bessel_i_scaled(nu, w);
  const double dz = z - zeta;
  const double lg = -0.5 * (a + 1.0) * std::log(2.0 * t) + 0.5 * (1.0 - a) * std::log(w) -
                    dz * dz / (4.0 * t);
  return std::exp(lg) * iscaled;
}

double g_profile(double a, double z, double t) {
  FractionalParams::from_a(a);
  require(z > 0 && t > 0, errc::invalid_argument, "g_profile: z and t must be positive");
  const double lg = -(1.0 - a) * std::log(2.0) - std::lgamma(0.5 * (1.0 - a)) +
                    (1.0 - a) * std::log(z) - 0.5 * (3.0 - a) * std::log(t) - z * z / (4.0 * t);
  return std::exp(lg);
}

double g_profile_dt(double a, double z, double t) {
  return g_profile(a, z, t) * (z * z / (4.0 * t * t) - 0.5 * (3.0 - a) / t);
}

double neumann_G(const ModelSpec& model, double a, const Vector& x, double t, double z,
                 const Vector& y, double tau, double zeta) {
  require(t > tau, errc::domain_error, "neumann_G: requires t > tau");
  const double dt = t - tau;
  return hormander_kernel(model, x, y, dt) * bessel_heat_kernel(a, z, zeta, dt);
}

double poisson_time_kernel(const ModelSpec& model, double a, const Vector& x, const Vector& y,
                           double t, double z) {
  return g_profile(a, z, t) * hormander_kernel(model, x, y, t);
}

double poisson_space_kernel(const ModelSpec& model, double a, const Vector& x, const Vector& y,
                            double z, const QuadratureConfig& quad) {
  FractionalParams::from_a(a);
  require(z > 0, errc::invalid_argument, "poisson_space_kernel: z must be positive");
  const double gamma_exp = 0.5 * (1.0 - a);

  // t <= z^2/4 through the substitution t = z^2/(4u): the endpoint
  // singularity becomes an e^{-u}-weighted tail, u in [1, inf)
  auto p_at_u = [&](double u) { return hormander_kernel(model, x, y, z * z / (4.0 * u)); };
  double acc = 0.0;
  {
    double lo = 1.0;
    for (int chunk = 0;; ++chunk) {
      require(chunk < 60, errc::quadrature_not_converged,
              "poisson_space_kernel: singular-endpoint integral did not converge");
      const double hi = 2.0 * lo;
      auto f = [&](double u) { return std::pow(u, gamma_exp - 1.0) * std::exp(-u) * p_at_u(u); };
      const double part = integrate_adaptive(f, lo, hi, quad).value / std::tgamma(gamma_exp);
      acc += part;
      lo = hi;
      if (lo >= 64.0 &&
          std::abs(part) <= 0.25 * std::max(quad.abs_tol, quad.rel_tol * std::abs(acc)))
        break;
    }
  }

  // t > z^2/4: the integrand g^a p is log-smooth and effectively unimodal in
  // log time. Scan for its peak and integrate the level-set window around it;
  // outside the window the integrand is below e^{-46} of the peak.
  {
    auto log_f = [&](double v) {
      const double t = std::exp(v);
      const double g = g_profile(a, z, t);
      if (g <= 0.0) return -std::numeric_limits<double>::infinity();
      return v + std::log(g) + hormander_log_kernel(model, x, y, t);
    };
    auto f = [&](double v) {
      const double t = std::exp(v);
      return t * g_profile(a, z, t) * hormander_kernel(model, x, y, t);
    };
    const double v0 = std::log(0.25 * z * z);
    const double v_cap = std::log(1e130);
    const double step = 0.25;
    double v_hi_scan = v0 + 60.0;
    double vmax = v0, fmax = log_f(v0);
    for (;;) {
      for (double v = vmax; v <= v_hi_scan; v += step) {
        const double lf = log_f(v);
        if (lf > fmax) {
          fmax = lf;
          vmax = v;
        }
      }
      if (vmax < v_hi_scan - 2.0 * step || v_hi_scan >= v_cap) break;
      v_hi_scan = std::min(v_hi_scan + 60.0, v_cap);  // peak at the edge: extend
    }
    require(std::isfinite(fmax), errc::quadrature_not_converged,
            "poisson_space_kernel: vanishing integrand");
    const double cutoff = fmax - 46.0;
    double v_lo = vmax, v_hi = vmax;
    while (v_lo > v0 && log_f(v_lo - step) > cutoff) v_lo -= step;
    while (v_hi < v_cap && log_f(v_hi + step) > cutoff) v_hi += step;
    acc += integrate_adaptive(f, std::max(v_lo - step, v0), v_hi + step, quad).value;
  }
  return acc;
}

}  // namespace hk
