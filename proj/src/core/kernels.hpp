#pragma once

#include "core/gramian.hpp"

namespace hk {

struct FractionalParams {
  double s = 0.5;
  double a = 0.0;

  static FractionalParams from_s(double s) {
    require(s > 0.0 && s < 1.0, errc::domain_error, "fractional: s must lie in (0,1)");
    return FractionalParams{s, 1.0 - 2.0 * s};
  }
  static FractionalParams from_a(double a) {
    require(a > -1.0 && a < 1.0, errc::domain_error, "fractional: a must lie in (-1,1)");
    return FractionalParams{0.5 * (1.0 - a), a};
  }
};

enum class KernelForm { k_form, c_form };

// Hormander's fundamental solution p(X, Y, t), evaluated in log space.
// K-form: (4 pi)^{-N/2} det(tK)^{-1/2} exp(-<(tK)^{-1} d, d>/4), d = Y - e^{tB} X
// C-form: (4 pi)^{-N/2} e^{-t tr B} det(C)^{-1/2} exp(-<C^{-1} e, e>/4), e = X - e^{-tB} Y
double hormander_kernel(const ModelSpec& model, const Vector& x, const Vector& y, double t,
                        KernelForm form = KernelForm::k_form);
double hormander_log_kernel(const ModelSpec& model, const Vector& x, const Vector& y, double t,
                            KernelForm form = KernelForm::k_form);
// grad_X p = -1/2 C(t)^{-1} (X - e^{-tB} Y) p
Vector hormander_kernel_gradX(const ModelSpec& model, const Vector& x, const Vector& y, double t);

// Kolmogorov's closed-form kernel on R^{2n}, constant fixed by unit mass:
// c_n = (sqrt(3)/(2 pi))^n.
double kolmogorov_kernel_explicit(const Vector& v, const Vector& x, const Vector& w,
                                  const Vector& y, double t, int n);

// Modified Bessel function of the first kind, nu > -1; series for x <= 30,
// asymptotic expansion beyond. The scaled form e^{-x} I_nu(x) avoids overflow.
double bessel_i(double nu, double x);
double bessel_i_scaled(double nu, double x);

// Bessel heat kernel (Neumann problem on the half line, weight z^a):
// p^a(z,zeta,t) = (2t)^{-(a+1)/2} (z zeta/2t)^{(1-a)/2} I_{(a-1)/2}(z zeta/2t)
//                 e^{-(z^2+zeta^2)/4t}; zeta = 0 handled by the series limit.
double bessel_heat_kernel(double a, double z, double zeta, double t);

// g^a(z,t) = z^{1-a} t^{-(3-a)/2} e^{-z^2/4t} / (2^{1-a} Gamma((1-a)/2))
double g_profile(double a, double z, double t);
double g_profile_dt(double a, double z, double t);  // exact t-derivative

// Neumann fundamental solution G^a = p(X,Y,t-tau) p^a(z,zeta,t-tau);
// pole on the thin manifold (zeta = 0) uses the boundary limit formula.
double neumann_G(const ModelSpec& model, double a, const Vector& x, double t, double z,
                 const Vector& y, double tau, double zeta);

// P^a_z(X,Y,t) = g^a(z,t) p(X,Y,t)
double poisson_time_kernel(const ModelSpec& model, double a, const Vector& x, const Vector& y,
                           double t, double z);

// P^a(X,Y,z) = int_0^inf P^a_z(X,Y,t) dt, via the substitution t = z^2/(4u)
double poisson_space_kernel(const ModelSpec& model, double a, const Vector& x, const Vector& y,
                            double z, const QuadratureConfig& quad);

}  // namespace hk
