#pragma once

#include <cstdint>

#include "core/linalg.hpp"

namespace hk {

// The operator pair (Q, B) of K u = tr(Q D^2 u) + <BX, grad u> - d_t u.
struct ModelSpec {
  int n = 0;
  Matrix q;
  Matrix b;
  double trace_b = 0.0;
  bool b_nilpotent = false;  // B^n == 0 exactly; Gramians have closed forms
  std::uint64_t hash = 0;

  static ModelSpec create(Matrix q, Matrix b);
};

ModelSpec heat_model(int n);
ModelSpec ornstein_uhlenbeck_model(int n);
// N = 2n, Q = diag(I_n, 0), B = [[0,0],[I_n,0]]
ModelSpec kolmogorov_model(int n);

}  // namespace hk
