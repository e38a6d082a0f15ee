#pragma once

#include <functional>

#include "core/linalg.hpp"

namespace hk {

struct QuadratureConfig {
  int gh_nodes = 40;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdiv = 2000;
  double balakrishnan_split = 1.0;
  double tail_cut = 1e-16;

  void validate() const {
    require(gh_nodes >= 2, errc::invalid_argument, "quadrature: gh_nodes must be >= 2");
    require(abs_tol > 0 && rel_tol > 0, errc::invalid_argument,
            "quadrature: tolerances must be positive");
    require(max_subdiv >= 1, errc::invalid_argument, "quadrature: max_subdiv must be >= 1");
    require(balakrishnan_split > 0, errc::invalid_argument,
            "quadrature: balakrishnan_split must be positive");
    require(tail_cut > 0, errc::invalid_argument, "quadrature: tail_cut must be positive");
  }
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

// Globally adaptive Gauss-Kronrod 15-point integration on [a, b].
// Throws quadrature_not_converged when max_subdiv panels do not reach the
// requested tolerance.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol, int max_subdiv);

inline QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                     const QuadratureConfig& quad) {
  return integrate_adaptive(f, a, b, quad.abs_tol, quad.rel_tol, quad.max_subdiv);
}

// Gauss-Hermite rule for weight e^{-x^2} on (-inf, inf), computed by
// Golub-Welsch and cached per node count.
struct GhRule {
  Vector nodes;
  Vector weights;  // sum w_i = sqrt(pi)
};

const GhRule& gauss_hermite(int n);

// Tensorized iteration over an N-dimensional Gauss-Hermite grid. The callback
// receives the product weight and the node vector. Dimension capped at 6.
void gh_tensor_foreach(const GhRule& rule, int dim,
                       const std::function<void(double, const Vector&)>& fn);

constexpr int kGhMaxDim = 6;

// Reference Gaussian measure e^{-<(Y-mu), A (Y-mu)>} for importance-style
// tensor GH over R^dim. Nodes are Y = mu + L^{-T} w with A = L L^T.
struct GaussRef {
  Vector mu;
  SpdFactor a_factor;

  // combine two quadratic forms exp(-(Y-m1)'A1(Y-m1)) exp(-(Y-m2)'A2(Y-m2))
  static GaussRef product(const Matrix& a1, const Vector& m1, const Matrix& a2,
                          const Vector& m2) {
    GaussRef ref;
    ref.a_factor = chol_logdet_scaled(symmetrized(a1 + a2));
    ref.mu = ref.a_factor.solve(a1 * m1 + a2 * m2);
    return ref;
  }
};

// int f(Y) dY with f evaluated through its logarithm (f > 0); exact whenever
// f / reference-Gaussian is polynomial of degree < 2 * nodes.
double integrate_gauss_ref_log(const GaussRef& ref, const GhRule& rule,
                               const std::function<double(const Vector&)>& log_f);
double integrate_gauss_ref(const GaussRef& ref, const GhRule& rule,
                           const std::function<double(const Vector&)>& f);

}  // namespace hk
