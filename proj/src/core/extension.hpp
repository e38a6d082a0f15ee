#pragma once

#include "core/fractional.hpp"

namespace hk {

// U(X,t,z) solving the extension problem for K_a, through the subordination
// form U = z^{1-a}/(2^{1-a} Gamma((1-a)/2)) int tau^{-(3-a)/2} e^{-z^2/4tau}
// P^K_tau u dtau; computed with the substitution tau = z^2/(4u).
double extend_K(const SpaceTimeGaussPoly& u, const ModelSpec& model, const Vector& x, double t,
                double z, double a, const QuadratureConfig& quad);

// U(X,t,z) - u(X,t) assembled directly from the semigroup differences;
// cancellation-free for small z.
double extend_K_minus_u(const SpaceTimeGaussPoly& u, const ModelSpec& model, const Vector& x,
                        double t, double z, double a, const QuadratureConfig& quad);

// Independent quadrature route through the Poisson kernel representation
// U = int int P^a_z(X,Y,tau) u(Y, t - tau) dY dtau (route-agreement probe).
double extend_K_direct(const SpaceTimeGaussPoly& u, const ModelSpec& model, const Vector& x,
                       double t, double z, double a, const QuadratureConfig& quad);

// Extension for the stationary operator by Bochner subordination:
// U(X,z) = int_0^inf g^a(z,t) P_t phi(X) dt.
double extend_A(const GaussPolyFunction& phi, const ModelSpec& model, const Vector& x, double z,
                double a, const QuadratureConfig& quad);

// Dirichlet-to-Neumann value -c_a z^a d_z U evaluated from the analytic
// derivative (two weighted semigroup integrals), never by differencing.
double dtn_K(const SpaceTimeGaussPoly& u, const ModelSpec& model, const Vector& x, double t,
             double s, double z, const QuadratureConfig& quad);

// |A U + B_z^a U - d_t U| / local scale by central finite differences.
double pde_residual(const std::function<double(const Vector&, double, double)>& field,
                    const ModelSpec& model, double a, const Vector& x, double t, double z,
                    double h_rel, bool has_time);

double pde_residual_poisson_time(const ModelSpec& model, double a, const Vector& x,
                                 const Vector& y_pole, double t, double z, double h_rel);
double pde_residual_extend_K(const SpaceTimeGaussPoly& u, const ModelSpec& model, double a,
                             const Vector& x, double t, double z, double h_rel,
                             const QuadratureConfig& quad);
double pde_residual_extend_A(const GaussPolyFunction& phi, const ModelSpec& model, double a,
                             const Vector& x, double z, double h_rel,
                             const QuadratureConfig& quad);

// kernel-mass route for u == 1: the extension of the constant function
double extend_constant_probe(const ModelSpec& model, const Vector& x, double z, double a,
                             const QuadratureConfig& quad);
// DtN of the constant function (both integrals vanish identically)
double dtn_constant_probe(const ModelSpec& model, const Vector& x, double s, double z,
                          const QuadratureConfig& quad);

}  // namespace hk
