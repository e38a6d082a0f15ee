#pragma once

#include "core/funcspace.hpp"
#include "core/kernels.hpp"

namespace hk {

// P_t f(X) = int p(X,Y,t) f(Y) dY. The transition Gaussian N(e^{tB}X, 2tK(t))
// and the Gaussian factor of f are combined analytically; the tensorized
// Gauss-Hermite rule then integrates the remaining polynomial, exactly for
// degree < 2 * gh_nodes.
double apply_Pt(const GaussPolyFunction& f, const ModelSpec& model, const Vector& x, double t,
                const QuadratureConfig& quad);

// Closed-form oracle for purely Gaussian f:
// amp * det(I + 2 Sigma M)^{-1/2} exp(-<(M^{-1}+2 Sigma)^{-1} d, d>), d = m - X0.
double apply_Pt_gauss_exact(const GaussPolyFunction& f, const ModelSpec& model, const Vector& x,
                            double t);

// P^K_tau u(X,t) = P_tau applied to the spatial slice Y -> u(Y, t - tau)
double apply_PK(const SpaceTimeGaussPoly& u, const ModelSpec& model, const Vector& x, double t,
                double tau, const QuadratureConfig& quad);

// P_t f(X) - f(X); below tau_switch the difference is evaluated through the
// exact generator Taylor expansion t A f + t^2/2 A^2 f to avoid cancellation.
class PtDelta {
public:
  PtDelta(const GaussPolyFunction& f, const ModelSpec& model);
  double operator()(const Vector& x, double t, const QuadratureConfig& quad) const;
  double f_value(const Vector& x) const { return f_->eval(x); }
  double semigroup_value(const Vector& x, double t, const QuadratureConfig& quad) const;

private:
  const GaussPolyFunction* f_;
  const ModelSpec* model_;
  GaussPolyFunction af_;
  GaussPolyFunction a2f_;
  // above the pivot-degeneracy threshold of anisotropic Gramians
  double tau_switch_ = 1e-6;
};

class PkDelta {
public:
  PkDelta(const SpaceTimeGaussPoly& u, const ModelSpec& model);
  double operator()(const Vector& x, double t, double tau, const QuadratureConfig& quad) const;
  double u_value(const Vector& x, double t) const { return u_->eval(x, t); }
  double semigroup_value(const Vector& x, double t, double tau,
                         const QuadratureConfig& quad) const;

private:
  const SpaceTimeGaussPoly* u_;
  const ModelSpec* model_;
  SpaceTimeGaussPoly ku_;
  SpaceTimeGaussPoly k2u_;
  double tau_switch_ = 1e-6;
};

// R(lambda, A) f(X) = int_0^inf e^{-lambda t} P_t f(X) dt, lambda > 0;
// tail truncated once e^{-lambda T} sup|f| / lambda < tail_cut.
double resolvent_apply(const GaussPolyFunction& f, const ModelSpec& model, double lambda,
                       const Vector& x, const QuadratureConfig& quad);

struct RateReport {
  struct Row {
    double t = 0.0;
    double sup_delta = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound + tolerance - sup_delta
  };
  std::vector<Row> rows;
  bool all_ok = false;
  double slope_smallest = 0.0;  // log-log slope between the two smallest grid times
};

// sup-norm rate probe: ||P_t f - f|| <= ||A f|| * max{1, e^{-tr B / p}} t with
// p = infinity (factor 1), over a finite evaluation grid.
RateReport rate_check(const GaussPolyFunction& f, const ModelSpec& model,
                      const std::vector<double>& t_grid, const std::vector<Vector>& x_grid,
                      const QuadratureConfig& quad);

// int p(X,Y,t) dY by GH against the kernel's own Gaussian; equals 1.
double kernel_mass_in_y(const ModelSpec& model, const Vector& x, double t, int gh_nodes);
// int p(X,Y,t) dX; equals e^{-t tr B}.
double kernel_mass_in_x(const ModelSpec& model, const Vector& y, double t, int gh_nodes);

// largest safe time for matrix exponentials of this model
double max_exp_time(const ModelSpec& model);

// Exact functional image P_s f for purely Gaussian f: again a Gaussian with
// shape e^{sB*} (M^{-1} + 2 Sigma_s)^{-1} e^{sB} and center e^{-sB} X0.
GaussPolyFunction pt_gauss_image(const GaussPolyFunction& f, const ModelSpec& model, double s);
// Image of a pure space-time Gaussian under P^K_s (spatial image tensor the
// time factor shifted by s).
SpaceTimeGaussPoly pk_gauss_image(const SpaceTimeGaussPoly& u, const ModelSpec& model, double s);

}  // namespace hk
