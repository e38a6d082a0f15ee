#include "core/fractional.hpp"

#include <cmath>

namespace hk {

namespace {

struct BalakrishnanParts {
  double integral = 0.0;
  double tail_t = 0.0;
  double tail_bound = 0.0;
};

// int_0^inf tau^{-1-s} [S(tau) - v] dtau, with delta = S(.) - v supplied
// directly and sem(.) the raw semigroup value for the tail limit estimate.
BalakrishnanParts balakrishnan_integral(const std::function<double(double)>& delta,
                                        const std::function<double(double)>& sem, double value_at0,
                                        double sup_bound, double s, double t_cap,
                                        const QuadratureConfig& quad, double near_floor = 0.0) {
  const double split = quad.balakrishnan_split;
  const double grading = 1.0 / (1.0 - s);

  BalakrishnanParts parts;
  if (near_floor <= 0.0) {
    // (0, split]: tau = split * w^{1/(1-s)} flattens the integrable endpoint
    auto near = [&](double w) {
      if (w <= 0.0) return 0.0;
      const double tau = split * std::pow(w, grading);
      if (tau <= 0.0) return 0.0;
      const double jac = split * grading * std::pow(w, grading - 1.0);
      return std::pow(tau, -1.0 - s) * delta(tau) * jac;
    };
    parts.integral += integrate_adaptive(near, 0.0, 1.0, quad).value;
  } else {
    // noise-floor variant for integrands that vanish identically near 0
    auto near = [&](double tau) { return std::pow(tau, -1.0 - s) * delta(tau); };
    parts.integral += integrate_adaptive(near, near_floor, split, quad).value;
  }

  auto far = [&](double tau) { return std::pow(tau, -1.0 - s) * delta(tau); };
  double lo = split;
  double sem_prev = sem(lo);
  for (int chunk = 0;; ++chunk) {
    require(lo < t_cap && chunk < 120, errc::quadrature_not_converged,
            "balakrishnan: far tail did not stabilize");
    const double hi = std::min(2.0 * lo, t_cap);
    parts.integral += integrate_adaptive(far, lo, hi, quad).value;
    lo = hi;
    const double sem_now = sem(lo);
    const double drift = std::abs(sem_now - sem_prev) * std::pow(lo, -s) / s;
    sem_prev = sem_now;
    if (lo >= 8.0 * split && drift < quad.abs_tol) break;
  }
  // remaining tail, with the semigroup value frozen at its last estimate
  parts.integral += (sem_prev - value_at0) * std::pow(lo, -s) / s;
  parts.tail_t = lo;
  parts.tail_bound = 2.0 * sup_bound * std::pow(lo, -s) / s;
  return parts;
}

}  // namespace

FracResult frac_A(const GaussPolyFunction& f, const ModelSpec& model, const Vector& x, double s,
                  const QuadratureConfig& quad) {
  FractionalParams::from_s(s);
  quad.validate();
  const PtDelta delta(f, model);
  const double fval = f.eval(x);
  const auto parts = balakrishnan_integral(
      [&](double tau) { return delta(x, tau, quad); },
      [&](double tau) { return delta.semigroup_value(x, tau, quad); }, fval, f.sup_bound(), s,
      max_exp_time(model), quad);
  const double factor = -s / std::tgamma(1.0 - s);
  return FracResult{factor * parts.integral, parts.tail_t, parts.tail_bound};
}

FracResult frac_K(const SpaceTimeGaussPoly& u, const ModelSpec& model, const Vector& x, double t,
                  double s, const QuadratureConfig& quad) {
  FractionalParams::from_s(s);
  quad.validate();
  const PkDelta delta(u, model);
  const double uval = u.eval(x, t);
  const auto parts = balakrishnan_integral(
      [&](double tau) { return delta(x, t, tau, quad); },
      [&](double tau) { return delta.semigroup_value(x, t, tau, quad); }, uval, u.sup_bound(), s,
      max_exp_time(model), quad);
  const double factor = -s / std::tgamma(1.0 - s);
  return FracResult{factor * parts.integral, parts.tail_t, parts.tail_bound};
}

double frac_constant_probe(const ModelSpec& model, const Vector& x, double s,
                           const QuadratureConfig& quad) {
  FractionalParams::from_s(s);
  auto mass = [&](double tau) { return kernel_mass_in_y(model, x, tau, quad.gh_nodes); };
  const auto parts =
      balakrishnan_integral([&](double tau) { return mass(tau) - 1.0; }, mass, 1.0, 1.0, s,
                            max_exp_time(model), quad, /*near_floor=*/1e-6);
  return -s / std::tgamma(1.0 - s) * parts.integral;
}

double frac_heat_oracle(const GaussPolyFunction& f, const Vector& x, double s,
                        const QuadratureConfig& quad) {
  require(s > 0.0 && s <= 1.0, errc::domain_error, "frac_heat_oracle: s must lie in (0,1]");
  require(!f.has_phase(), errc::domain_error, "frac_heat_oracle: modulated input not supported");
  const GaussPolyFunction fhat = fourier_exact(f);
  const int n = f.n;

  Eigen::SelfAdjointEigenSolver<Matrix> es(fhat.shape);
  const double lambda_min = es.eigenvalues().minCoeff();
  const double radius = 1.2 * std::sqrt((std::log(1.0 / quad.tail_cut) + 25.0) / lambda_min);

  auto spectral = [&](const Vector& xi) {
    const double r2 = xi.squaredNorm();
    const double mult = std::pow(4.0 * M_PI * M_PI * r2, s);
    const double theta = 2.0 * M_PI * x.dot(xi);
    const Cplx val = fhat.eval_c(xi) * Cplx(std::cos(theta), std::sin(theta));
    return mult * val.real();
  };

  if (n == 1) {
    auto g = [&](double xi) {
      Vector v(1);
      v(0) = xi;
      return spectral(v);
    };
    return integrate_adaptive(g, -radius, 0.0, quad).value +
           integrate_adaptive(g, 0.0, radius, quad).value;
  }
  if (n == 2) {
    const int n_theta = 128;
    auto ring = [&](double r) {
      double acc = 0.0;
      for (int k = 0; k < n_theta; ++k) {
        const double theta = 2.0 * M_PI * k / n_theta;
        Vector xi(2);
        xi << r * std::cos(theta), r * std::sin(theta);
        acc += spectral(xi);
      }
      return acc * (2.0 * M_PI / n_theta) * r;
    };
    return integrate_adaptive(ring, 0.0, radius, quad).value;
  }
  throw Error(errc::dimension_limit, "frac_heat_oracle: supported for N <= 2");
}

}  // namespace hk
