#pragma once

#include "core/semigroup.hpp"

namespace hk {

struct FracResult {
  double value = 0.0;
  double tail_t = 0.0;      // truncation point of the far integral
  double tail_bound = 0.0;  // 2 sup|f| T^{-s} / s
};

// (-A)^s f(X) = -s/Gamma(1-s) int_0^inf t^{-1-s} [P_t f(X) - f(X)] dt.
// Near 0 the integrand is graded by t = split * w^{1/(1-s)}; the far integral
// runs over doubling chunks until the semigroup value stabilizes, with the
// remaining tail added in closed form from the last semigroup value.
FracResult frac_A(const GaussPolyFunction& f, const ModelSpec& model, const Vector& x, double s,
                  const QuadratureConfig& quad);

FracResult frac_K(const SpaceTimeGaussPoly& u, const ModelSpec& model, const Vector& x, double t,
                  double s, const QuadratureConfig& quad);

// Independent Fourier-multiplier oracle for the heat model (Q = I, B = 0):
// (-Delta)^s f(X) = int (4 pi^2 |xi|^2)^s fhat(xi) e^{2 pi i <X, xi>} d xi.
// Supports N = 1 (adaptive) and N = 2 (polar); s in (0, 1].
double frac_heat_oracle(const GaussPolyFunction& f, const Vector& x, double s,
                        const QuadratureConfig& quad);

// Balakrishnan pipeline applied to the exact kernel mass (P_t 1 = 1); the
// probe for (-A)^s applied to a constant, which must vanish.
double frac_constant_probe(const ModelSpec& model, const Vector& x, double s,
                           const QuadratureConfig& quad);

}  // namespace hk
