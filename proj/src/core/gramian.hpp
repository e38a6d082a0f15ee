#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "core/model.hpp"
#include "core/quadrature.hpp"

namespace hk {

// Factored covariance data at one time: C(t), tK(t) = e^{tB} C(t) e^{tB*},
// their Cholesky factors when positive definite, and e^{tB}.
struct GramianPair {
  double t = 0.0;
  Matrix c;
  Matrix tk;
  Matrix exp_tb;
  std::optional<SpdFactor> c_factor;
  std::optional<SpdFactor> tk_factor;

  const SpdFactor& c_spd() const {
    require(c_factor.has_value(), errc::not_positive_definite, "C(t) is singular");
    return *c_factor;
  }
  const SpdFactor& tk_spd() const {
    require(tk_factor.has_value(), errc::not_positive_definite, "tK(t) is singular");
    return *tk_factor;
  }
};

// C(t) = int_0^t e^{-sB} Q e^{-sB*} ds via the Van Loan block exponential,
// with a Taylor-series path for small t.
Matrix gramian_C(const ModelSpec& model, double t);
// K(t) = (1/t) e^{tB} C(t) e^{tB*}
Matrix gramian_K(const ModelSpec& model, double t);
// Independent entrywise adaptive Gauss-Kronrod route; test/cross-check oracle.
Matrix gramian_C_quadrature(const ModelSpec& model, double t, const QuadratureConfig& quad);

// Shared memo keyed by (model hash, t).
std::shared_ptr<const GramianPair> transition(const ModelSpec& model, double t);

// || e^{-tB} Q e^{-tB*} - Q + B C(t) + C(t) B* ||_F / (1 + ||Q||_F)
double lyapunov_residual(const ModelSpec& model, double t);

struct HypoReport {
  int kalman_rank = 0;
  bool is_hypoelliptic = false;
  std::vector<std::pair<double, double>> sampled_min_eig_k;
  double trace_b = 0.0;
  bool lp_contractive = false;
};

HypoReport hypo_report(const ModelSpec& model,
                       std::vector<double> sample_times = {1e-3, 1e-2, 0.1, 1.0, 10.0});

}  // namespace hk
