#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/funcspace.hpp"

using namespace hk;

namespace {

GaussPolyFunction gauss1d(double m, double center = 0.0, double amp = 1.0) {
  Vector c(1);
  c << center;
  Matrix shape(1, 1);
  shape << m;
  return GaussPolyFunction::pure_gaussian(c, shape, amp);
}

GaussPolyFunction random_member(std::mt19937& rng, int n, int degree) {
  std::normal_distribution<double> dist(0.0, 0.8);
  Vector center(n);
  for (int i = 0; i < n; ++i) center(i) = 0.3 * dist(rng);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = dist(rng);
  Matrix shape = 0.5 * (g * g.transpose()) + Matrix::Identity(n, n);
  Poly p(n);
  std::uniform_int_distribution<int> expd(0, degree);
  for (int t = 0; t < 3; ++t) {
    std::vector<int> e(n);
    for (int i = 0; i < n; ++i) e[i] = expd(rng);
    p.add_term(e, dist(rng));
  }
  return GaussPolyFunction::create(center, shape, std::move(p), 1.0);
}

}  // namespace

TEST_CASE("generator on the standard Gaussian: heat model") {
  // f = exp(-pi |X|^2), Q = I, B = 0: A f(0) = -2 pi
  const auto f = gauss1d(M_PI);
  const auto model = heat_model(1);
  const auto af = apply_A_exact(f, model);
  Vector zero(1);
  zero << 0.0;
  CHECK(af.eval(zero) == doctest::Approx(-2.0 * M_PI).epsilon(1e-13));
  // full closed form (4 pi^2 X^2 - 2 pi) exp(-pi X^2)
  Vector x(1);
  x << 0.7;
  const double expected = (4.0 * M_PI * M_PI * 0.49 - 2.0 * M_PI) * std::exp(-M_PI * 0.49);
  CHECK(af.eval(x) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("pure drift: A f = X f'(X)") {
  // f = X exp(-X^2), Q = 0, B = [[1]]: A f(1) = -e^{-1}
  Vector c(1);
  c << 0.0;
  Matrix shape(1, 1);
  shape << 1.0;
  Poly p(1);
  p.add_term({1}, 1.0);
  const auto f = GaussPolyFunction::create(c, shape, std::move(p), 1.0);
  Matrix q = Matrix::Zero(1, 1);
  Matrix b(1, 1);
  b << 1.0;
  const auto model = ModelSpec::create(q, b);
  const auto af = apply_A_exact(f, model);
  Vector one(1);
  one << 1.0;
  CHECK(af.eval(one) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-13));
}

TEST_CASE("Kolmogorov model generator at the origin") {
  const auto model = kolmogorov_model(1);
  const auto f = GaussPolyFunction::pure_gaussian(Vector::Zero(2), Matrix::Identity(2, 2), 1.0);
  const auto af = apply_A_exact(f, model);
  CHECK(af.eval(Vector::Zero(2)) == doctest::Approx(-2.0).epsilon(1e-13));
}

TEST_CASE("generator output keeps the Gaussian factor and grows degree by at most 2") {
  std::mt19937 rng(3);
  const auto model = kolmogorov_model(1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_member(rng, 2, 3);
    const auto af = apply_A_exact(f, model);
    CHECK((af.center - f.center).norm() == 0.0);
    CHECK((af.shape - f.shape).norm() == 0.0);
    CHECK(af.poly.total_degree() <= f.poly.total_degree() + 2);
  }
}

TEST_CASE("generator is linear coefficient-wise") {
  std::mt19937 rng(17);
  const auto model = kolmogorov_model(1);
  const auto f = random_member(rng, 2, 3);
  // same Gaussian factor, different polynomial
  Poly q(2);
  q.add_term({2, 1}, 0.7);
  q.add_term({0, 0}, -0.4);
  const auto g = GaussPolyFunction::create(f.center, f.shape, std::move(q), 1.0);
  const double alpha = 1.3, beta = -0.6;

  const auto combo = add(GaussPolyFunction::create(f.center, f.shape, f.poly.scaled(alpha), 1.0),
                         GaussPolyFunction::create(f.center, f.shape, g.poly.scaled(beta), 1.0));
  const auto lhs = apply_A_exact(combo, model);
  const auto rhs = add(
      GaussPolyFunction::create(f.center, f.shape, apply_A_exact(f, model).poly.scaled(alpha), 1.0),
      GaussPolyFunction::create(f.center, f.shape, apply_A_exact(g, model).poly.scaled(beta), 1.0));

  for (const auto& [e, coef] : lhs.poly.terms()) {
    auto it = rhs.poly.terms().find(e);
    const Cplx other = it == rhs.poly.terms().end() ? Cplx(0, 0) : it->second;
    CHECK(std::abs(coef - other) <= 1e-13 * std::max(1.0, std::abs(coef)));
  }
}

TEST_CASE("space-time: time-constant factor reduces K to A") {
  const auto model = kolmogorov_model(1);
  const auto f = GaussPolyFunction::pure_gaussian(Vector::Zero(2), Matrix::Identity(2, 2), 1.0);
  const auto u = SpaceTimeGaussPoly::time_constant(f);
  const auto ku = apply_K_exact(u, model);
  const auto af = apply_A_exact(f, model);
  Vector x(2);
  x << 0.4, -0.2;
  for (double t : {-1.0, 0.0, 2.0}) CHECK(ku.eval(x, t) == doctest::Approx(af.eval(x)).epsilon(1e-13));
}

TEST_CASE("space-time: K u = e^{-t^2} A f + 2 t e^{-t^2} f") {
  const auto model = heat_model(1);
  const auto f = gauss1d(1.0);
  Vector tc(1);
  tc << 0.0;
  Matrix ts(1, 1);
  ts << 1.0;
  const auto u = SpaceTimeGaussPoly::tensor(f, GaussPolyFunction::pure_gaussian(tc, ts, 1.0));
  const auto ku = apply_K_exact(u, model);
  const auto af = apply_A_exact(f, model);
  Vector x(1);
  x << 0.3;
  for (double t : {-0.7, 0.2, 1.1}) {
    const double expected = std::exp(-t * t) * af.eval(x) + 2.0 * t * std::exp(-t * t) * f.eval(x);
    CHECK(ku.eval(x, t) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("fourier: standard Gaussian is self-dual") {
  const auto f = gauss1d(M_PI);
  const auto fhat = fourier_exact(f);
  Vector xi(1);
  xi << 0.63;
  CHECK(fhat.eval(xi) == doctest::Approx(std::exp(-M_PI * 0.63 * 0.63)).epsilon(1e-13));
}

TEST_CASE("fourier: X exp(-pi X^2) maps to -i xi exp(-pi xi^2)") {
  Vector c(1);
  c << 0.0;
  Matrix shape(1, 1);
  shape << M_PI;
  Poly p(1);
  p.add_term({1}, 1.0);
  const auto f = GaussPolyFunction::create(c, shape, std::move(p), 1.0);
  const auto fhat = fourier_exact(f);
  Vector xi(1);
  xi << 0.8;
  const Cplx got = fhat.eval_c(xi);
  const Cplx expected(0.0, -0.8 * std::exp(-M_PI * 0.64));
  CHECK(std::abs(got - expected) < 1e-13);
}

TEST_CASE("fourier: Plancherel identity for random members") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_member(rng, 2, 2);
    const auto fhat = fourier_exact(f);
    CHECK(l2_norm(f) == doctest::Approx(l2_norm(fhat)).epsilon(1e-10));
  }
}

TEST_CASE("fourier involution equals reflection") {
  std::mt19937 rng(31);
  const auto f = random_member(rng, 2, 2);
  const auto ff = fourier_exact(fourier_exact(f));
  // f(-X) has center -X0 and coefficients flipped by parity
  CHECK((ff.center + f.center).norm() < 1e-12);
  CHECK((ff.shape - f.shape).norm() < 1e-12 * f.shape.norm());
  for (const auto& [e, coef] : f.poly.terms()) {
    int parity = 0;
    for (int k : e) parity += k;
    const Cplx expected = (parity % 2 == 0 ? 1.0 : -1.0) * coef * f.amplitude;
    auto it = ff.poly.terms().find(e);
    REQUIRE(it != ff.poly.terms().end());
    CHECK(std::abs(it->second * ff.amplitude - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("symbol identity for the transformed generator") {
  // FT(A f)(xi) = -[<B* xi, grad fhat> + (4 pi^2 <Q xi, xi> + tr B) fhat(xi)]
  std::mt19937 rng(37);
  Matrix q(2, 2);
  q << 1.0, 0.0, 0.0, 0.0;
  Matrix b(2, 2);
  b << 0.0, 0.0, 1.0, 0.0;
  const auto model = ModelSpec::create(q, b);
  const auto f = random_member(rng, 2, 2);
  const auto af_hat = fourier_exact(apply_A_exact(f, model));
  const auto fhat = fourier_exact(f);

  std::uniform_real_distribution<double> dist(-1.2, 1.2);
  for (int k = 0; k < 10; ++k) {
    Vector xi(2);
    xi << dist(rng), dist(rng);
    const Cplx lhs = af_hat.eval_c(xi);
    const Eigen::VectorXcd grad = fhat.eval_grad_c(xi);
    const Vector bt_xi = model.b.transpose() * xi;
    Cplx rhs = -(bt_xi(0) * grad(0) + bt_xi(1) * grad(1) +
                 (4.0 * M_PI * M_PI * xi.dot(model.q * xi) + model.trace_b) * fhat.eval_c(xi));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("invariants: shape must be symmetric positive definite") {
  Vector c(1);
  c << 0.0;
  Matrix bad(1, 1);
  bad << -1.0;
  CHECK_THROWS_AS(GaussPolyFunction::pure_gaussian(c, bad, 1.0), Error);

  Matrix asym(2, 2);
  asym << 1.0, 0.2, 0.1, 1.0;
  CHECK_THROWS_AS(GaussPolyFunction::pure_gaussian(Vector::Zero(2), asym, 1.0), Error);
}

TEST_CASE("degree cap is enforced") {
  Vector c(1);
  c << 0.0;
  Matrix shape(1, 1);
  shape << 1.0;
  Poly p(1);
  p.add_term({15}, 1.0);
  const auto f = GaussPolyFunction::create(c, shape, std::move(p), 1.0);
  // each generator application adds up to 2 to the degree
  const auto model = heat_model(1);
  CHECK_THROWS_AS(apply_A_exact(f, model), Error);
}

TEST_CASE("gaussian moments match closed forms") {
  Matrix cov(2, 2);
  cov << 2.0, 0.5, 0.5, 1.0;
  CHECK(gaussian_moment(cov, {2, 0}) == doctest::Approx(2.0));
  CHECK(gaussian_moment(cov, {1, 1}) == doctest::Approx(0.5));
  CHECK(gaussian_moment(cov, {4, 0}) == doctest::Approx(3.0 * 4.0));  // 3 sigma^4
  CHECK(gaussian_moment(cov, {1, 0}) == 0.0);
}
