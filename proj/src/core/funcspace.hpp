#pragma once

#include <complex>
#include <map>
#include <vector>

#include "core/model.hpp"

namespace hk {

using Cplx = std::complex<double>;

// Sparse multivariate polynomial, exponent vector -> complex coefficient.
class Poly {
public:
  explicit Poly(int nvars) : nvars_(nvars) {}
  static Poly constant(int nvars, Cplx c);
  static Poly monomial(int nvars, const std::vector<int>& exps, Cplx c);

  int nvars() const { return nvars_; }
  int total_degree() const;
  bool empty() const { return terms_.empty(); }
  const std::map<std::vector<int>, Cplx>& terms() const { return terms_; }

  void add_term(const std::vector<int>& exps, Cplx c);
  Poly operator+(const Poly& other) const;
  Poly operator-(const Poly& other) const;
  Poly operator*(const Poly& other) const;
  Poly scaled(Cplx c) const;
  Poly derivative(int var) const;
  // multiply by (<w, Z> + c)
  Poly times_linear(const Vector& w, Cplx c) const;
  // fix variable `var` to `value` and drop it
  Poly substitute_and_drop(int var, double value) const;
  Poly conjugated() const;

  Cplx eval(const Vector& z) const;
  double max_coeff_abs() const;

private:
  int nvars_;
  std::map<std::vector<int>, Cplx> terms_;
};

// f(X) = amplitude * poly(X - center) * exp(-<M (X-center), X-center>)
//                  * exp(-2 pi i <phase, X>)
// The phase vector appears only on the Fourier side; user-facing functions
// keep it zero. Closed under the generator A, d/dt, products with linear
// forms, and the Fourier transform.
struct GaussPolyFunction {
  int n = 0;
  Vector center;
  Matrix shape;
  Poly poly{0};
  Cplx amplitude{1.0, 0.0};
  Vector phase;
  SpdFactor shape_factor;
  int degree_cap = 16;

  static GaussPolyFunction create(Vector center, Matrix shape, Poly poly, Cplx amplitude = 1.0,
                                  int degree_cap = 16);
  // positive semi-definite shape allowed; no Cholesky factor is stored
  static GaussPolyFunction create_semidefinite(Vector center, Matrix shape, Poly poly,
                                               Cplx amplitude, int degree_cap);
  static GaussPolyFunction pure_gaussian(Vector center, Matrix shape, double amplitude = 1.0);

  bool is_pure_gaussian() const;
  bool has_phase() const;
  bool has_spd_factor() const { return shape_factor.chol_lower.size() != 0; }

  Cplx eval_c(const Vector& x) const;
  // truncates imaginary residue up to 1e-12 * (1 + |Re|), errors beyond
  double eval(const Vector& x) const;
  Eigen::VectorXcd eval_grad_c(const Vector& x) const;

  // upper bound for sup |f|; exact (=|amplitude|) for pure Gaussians
  double sup_bound() const;

private:
  // flattened terms for fast evaluation
  std::vector<int> flat_exps_;
  std::vector<Cplx> flat_coeffs_;
  void flatten();
};

// requires identical center/shape/phase
GaussPolyFunction add(const GaussPolyFunction& f, const GaussPolyFunction& g);

// tr(Q D^2 f) + <B X, grad f>, exact in the algebra (phase-free input)
GaussPolyFunction apply_generator(const GaussPolyFunction& f, const Matrix& q, const Matrix& b);
GaussPolyFunction apply_A_exact(const GaussPolyFunction& f, const ModelSpec& model);

// Fourier transform, convention fhat(xi) = int f(X) e^{-2 pi i <X, xi>} dX
GaussPolyFunction fourier_exact(const GaussPolyFunction& f);

// int f dX (phase-free); closed form via Gaussian moments
Cplx integral(const GaussPolyFunction& f);
double l2_norm(const GaussPolyFunction& f);

// E[Z^alpha] for Z ~ N(0, cov), by the Wick/Stein recursion
double gaussian_moment(const Matrix& cov, const std::vector<int>& alpha);

// u(X, t) on R^{N+1}: joint polynomial with block-diagonal Gaussian
// (space block tensor one time variable).
struct SpaceTimeGaussPoly {
  GaussPolyFunction joint;
  int space_dim = 0;
  bool time_constant_flag = false;

  static SpaceTimeGaussPoly tensor(const GaussPolyFunction& space,
                                   const GaussPolyFunction& time1d);
  // constant-in-time extension u(X, t) = f(X); the time block of the joint
  // Gaussian is zero, so only slicing and the generator act on it
  static SpaceTimeGaussPoly time_constant(const GaussPolyFunction& space);
  GaussPolyFunction space_slice(double t) const;
  double eval(const Vector& x, double t) const;
  double sup_bound() const;
};

// K u = A u - d_t u, exact
SpaceTimeGaussPoly apply_K_exact(const SpaceTimeGaussPoly& u, const ModelSpec& model);

}  // namespace hk
