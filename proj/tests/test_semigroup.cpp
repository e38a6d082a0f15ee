#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/semigroup.hpp"
#include "core/verify.hpp"

using namespace hk;

namespace {

const QuadratureConfig kQuad;

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

GaussPolyFunction gauss1d(double m) {
  return GaussPolyFunction::pure_gaussian(Vector::Zero(1), m * Matrix::Identity(1, 1), 1.0);
}

}  // namespace

TEST_CASE("P_t of the constant function through the kernel mass") {
  for (const auto& model : {heat_model(2), kolmogorov_model(1), ornstein_uhlenbeck_model(2)}) {
    for (double t : {0.1, 1.0}) {
      CHECK(std::abs(kernel_mass_in_y(model, battery_point(model.n), t, 40) - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("heat semigroup on a Gaussian: closed form") {
  const auto model = heat_model(1);
  const auto f = gauss1d(1.0);
  // P_t f(X) = (1+4t)^{-1/2} exp(-X^2/(1+4t))
  for (double t : {0.25, 1.0, 4.0}) {
    for (double x : {0.0, 0.8}) {
      const double expected = std::pow(1.0 + 4.0 * t, -0.5) * std::exp(-x * x / (1.0 + 4.0 * t));
      CHECK(apply_Pt(f, model, vec1(x), t, kQuad) == doctest::Approx(expected).epsilon(1e-12));
      CHECK(apply_Pt_gauss_exact(f, model, vec1(x), t) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
  CHECK(apply_Pt(f, model, vec1(0.0), 1.0, kQuad) ==
        doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-13));
}

TEST_CASE("quadrature route matches the exact Gaussian oracle") {
  const auto model = kolmogorov_model(1);
  const auto f = battery_function(2);
  Vector x(2);
  x << 0.0, 0.0;
  CHECK(apply_Pt(f, model, x, 0.5, kQuad) ==
        doctest::Approx(apply_Pt_gauss_exact(f, model, x, 0.5)).epsilon(1e-10));
  x << 0.7, -0.3;
  for (double t : {0.01, 0.4, 3.0, 25.0}) {
    const double a = apply_Pt(f, model, x, t, kQuad);
    const double b = apply_Pt_gauss_exact(f, model, x, t);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
  }
}

TEST_CASE("gauss-exact oracle: t -> 0 limit") {
  const auto model = kolmogorov_model(1);
  const auto f = battery_function(2);
  Vector x(2);
  x << 0.4, 0.2;
  CHECK(apply_Pt_gauss_exact(f, model, x, 1e-10) == doctest::Approx(f.eval(x)).epsilon(1e-6));
  CHECK(apply_Pt_gauss_exact(f, model, x, 0.0) == f.eval(x));
}

TEST_CASE("gauss-exact oracle cross-checked through the Fourier transform") {
  // P_t f = inverse transform of e^{-t tr B} e^{-4 pi^2 <C(t) xi, xi>}
  //         fhat(e^{-tB*} xi)
  const auto model = kolmogorov_model(1);
  const auto f = battery_function(2);
  const auto fhat = fourier_exact(f);
  const double t = 0.6;
  const Vector x = battery_point(2);
  const auto pair = transition(model, t);
  const Matrix c = pair->c;
  const Matrix emtbs = pair->exp_tb.transpose().inverse();

  const GhRule& rule = gauss_hermite(48);
  // reference measure: the C(t) Gaussian combined with the transported
  // Gaussian factor of fhat
  const Matrix a1 = 4.0 * M_PI * M_PI * c;
  const Matrix mtb = pair->exp_tb.inverse();
  const Matrix a2 = symmetrized(mtb * fhat.shape * mtb.transpose());
  const GaussRef ref = GaussRef::product(a1, Vector::Zero(2), a2, Vector::Zero(2));
  const double value = integrate_gauss_ref(ref, rule, [&](const Vector& xi) {
    const Cplx fh = fhat.eval_c(emtbs * xi);
    const double theta = 2.0 * M_PI * x.dot(xi);
    const Cplx val = std::exp(-t * model.trace_b) *
                     std::exp(-4.0 * M_PI * M_PI * xi.dot(c * xi)) * fh *
                     Cplx(std::cos(theta), std::sin(theta));
    return val.real();
  });
  CHECK(value == doctest::Approx(apply_Pt_gauss_exact(f, model, x, t)).epsilon(1e-8));
}

TEST_CASE("evolutive semigroup equals P_t on time-independent input") {
  const auto model = kolmogorov_model(1);
  const auto f = battery_function(2);
  const auto u = SpaceTimeGaussPoly::time_constant(f);
  const Vector x = battery_point(2);
  for (double t : {-0.4, 0.0, 1.3}) {
    for (double tau : {0.2, 1.0}) {
      CHECK(apply_PK(u, model, x, t, tau, kQuad) ==
            doctest::Approx(apply_Pt(f, model, x, tau, kQuad)).epsilon(1e-13));
    }
  }
}

TEST_CASE("evolutive semigroup law on a Gaussian") {
  const auto model = kolmogorov_model(1);
  const auto u = battery_spacetime(2);
  const Vector x = battery_point(2);
  const double t = 0.3, tau = 0.45, s = 0.3;
  const double direct = apply_PK(u, model, x, t, tau + s, kQuad);
  const double composed = apply_PK(pk_gauss_image(u, model, s), model, x, t, tau, kQuad);
  CHECK(std::abs(direct - composed) <= 1e-7 * std::abs(direct));
}

TEST_CASE("resolvent identity and frozen reference value") {
  const auto model = heat_model(1);
  const auto f = gauss1d(M_PI);
  // lambda R f - R(A f) = f pointwise
  const Vector x = vec1(0.2);
  const double lambda = 1.0;
  const auto af = apply_A_exact(f, model);
  const double rf = resolvent_apply(f, model, lambda, x, kQuad);
  const double raf = resolvent_apply(af, model, lambda, x, kQuad);
  CHECK(std::abs(lambda * rf - raf - f.eval(x)) <= 1e-6);

  // int_0^inf e^{-t} (1 + 4 pi t)^{-1/2} dt, frozen from an independent
  // high-precision quadrature of the closed-form integrand
  CHECK(resolvent_apply(f, model, 1.0, vec1(0.0), kQuad) ==
        doctest::Approx(0.373541364178996068).epsilon(1e-9));
}

TEST_CASE("resolvent sup bound") {
  const auto model = kolmogorov_model(1);
  const auto f = battery_function(2);
  const double lambda = 1.3;
  double sup_f = 0.0, sup_rf = 0.0;
  for (double x0 : {-0.8, 0.0, 0.5}) {
    Vector x(2);
    x << x0, 0.3 * x0;
    sup_f = std::max(sup_f, std::abs(f.eval(x)));
    sup_rf = std::max(sup_rf, std::abs(resolvent_apply(f, model, lambda, x, kQuad)));
  }
  CHECK(sup_rf <= f.sup_bound() / lambda + 1e-6);
  CHECK(sup_rf <= sup_f / lambda + 1e-6);
}

TEST_CASE("resolvent requires a positive real part") {
  const auto model = heat_model(1);
  const auto f = gauss1d(1.0);
  CHECK_THROWS_AS(resolvent_apply(f, model, -0.5, vec1(0.0), kQuad), Error);
}

TEST_CASE("rate lemma margins and first-order slope") {
  const auto model = kolmogorov_model(1);
  const auto f = battery_function(2);
  std::vector<Vector> grid;
  for (double a : {-1.0, -0.3, 0.0, 0.4, 1.1}) {
    Vector x(2);
    x << a, -0.5 * a;
    grid.push_back(x);
  }
  const auto report = rate_check(f, model, {1e-3, 1e-2, 0.1, 1.0}, grid, kQuad);
  CHECK(report.all_ok);
  for (const auto& row : report.rows) CHECK(row.margin >= 0.0);
  CHECK(report.slope_smallest >= 0.95);

  const auto heat = heat_model(1);
  const auto g = gauss1d(1.0);
  const auto heat_report = rate_check(g, heat, {0.01}, {vec1(0.0), vec1(0.7)}, kQuad);
  CHECK(heat_report.all_ok);
}

TEST_CASE("contraction on the sup norm for tr B >= 0") {
  const auto model = kolmogorov_model(1);
  const auto f = battery_function(2);
  double sup_f = 0.0, sup_pt = 0.0;
  for (double a : {-1.2, -0.4, 0.0, 0.6, 1.0}) {
    Vector x(2);
    x << a, 0.7 * a;
    sup_f = std::max(sup_f, std::abs(f.eval(x)));
    sup_pt = std::max(sup_pt, std::abs(apply_Pt(f, model, x, 0.8, kQuad)));
  }
  CHECK(sup_pt <= sup_f + 1e-8);
}

TEST_CASE("commutation P_t A f = d/dt P_t f") {
  const auto model = kolmogorov_model(1);
  const auto f = battery_function(2);
  const Vector x = battery_point(2);
  const double t = 0.5, h = 1e-4;
  const auto af = apply_A_exact(f, model);
  const double lhs = apply_Pt(af, model, x, t, kQuad);
  const double rhs =
      (apply_Pt(f, model, x, t + h, kQuad) - apply_Pt(f, model, x, t - h, kQuad)) / (2.0 * h);
  CHECK(std::abs(lhs - rhs) <= 1e-6);
}

TEST_CASE("t = 0 returns the function value; negative t rejected") {
  const auto model = heat_model(1);
  const auto f = gauss1d(1.0);
  CHECK(apply_Pt(f, model, vec1(0.3), 0.0, kQuad) == f.eval(vec1(0.3)));
  CHECK_THROWS_AS(apply_Pt(f, model, vec1(0.3), -0.1, kQuad), Error);
}

TEST_CASE("tensorized quadrature rejects large dimensions") {
  const auto model = heat_model(7);
  const auto f = battery_function(7);
  CHECK_THROWS_AS(apply_Pt(f, model, Vector::Zero(7), 0.5, kQuad), Error);
}

TEST_CASE("delta evaluators switch to the exact Taylor path near zero") {
  const auto model = kolmogorov_model(1);
  const auto f = battery_function(2);
  const PtDelta delta(f, model);
  const Vector x = battery_point(2);
  // consistency across the switch at 1e-6
  const double above = delta(x, 2e-6, kQuad) / 2e-6;
  const double below = delta(x, 0.5e-6, kQuad) / 0.5e-6;
  CHECK(above == doctest::Approx(below).epsilon(1e-5));
  // tiny tau produces clean values, no cancellation noise
  const double tiny = delta(x, 1e-12, kQuad);
  CHECK(std::abs(tiny) > 0.0);
  CHECK(std::abs(tiny) < 1e-11);
}
