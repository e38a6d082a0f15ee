#include "hypokernel/hypokernel.h"

#include <cstdlib>
#include <cstring>
#include <variant>

#include "core/commands.hpp"

using namespace hk;

struct hk_model {
  ModelSpec spec;
};

struct hk_function {
  std::variant<GaussPolyFunction, SpaceTimeGaussPoly> value;

  const GaussPolyFunction& spatial() const {
    require(std::holds_alternative<GaussPolyFunction>(value), errc::invalid_argument,
            "expected a spatial function handle");
    return std::get<GaussPolyFunction>(value);
  }
  const SpaceTimeGaussPoly& spacetime() const {
    require(std::holds_alternative<SpaceTimeGaussPoly>(value), errc::invalid_argument,
            "expected a space-time function handle");
    return std::get<SpaceTimeGaussPoly>(value);
  }
};

namespace {

thread_local std::string g_last_error;

hk_status status_of(const Error& e) {
  switch (e.code()) {
    case errc::invalid_argument: return HK_ERR_INVALID_ARGUMENT;
    case errc::parse_error: return HK_ERR_PARSE;
    case errc::not_positive_definite: return HK_ERR_NOT_POSITIVE_DEFINITE;
    case errc::not_hypoelliptic: return HK_ERR_NOT_HYPOELLIPTIC;
    case errc::quadrature_not_converged: return HK_ERR_QUADRATURE;
    case errc::domain_error: return HK_ERR_DOMAIN;
    case errc::degree_overflow: return HK_ERR_DEGREE_OVERFLOW;
    case errc::dimension_limit: return HK_ERR_DIMENSION_LIMIT;
    default: return HK_ERR_INTERNAL;
  }
}

template <typename Fn>
hk_status guarded(Fn&& fn) {
  try {
    fn();
    return HK_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HK_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Matrix matrix_from(const double* data, int n) {
  require(data != nullptr, errc::invalid_argument, "null matrix pointer");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = data[i * n + j];
  return m;
}

Vector vector_from(const double* data, int n) {
  require(data != nullptr, errc::invalid_argument, "null vector pointer");
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = data[i];
  return v;
}

QuadratureConfig quad_from(const hk_quad_options* opts) {
  QuadratureConfig quad;
  if (opts) {
    quad.gh_nodes = opts->gh_nodes;
    quad.abs_tol = opts->abs_tol;
    quad.rel_tol = opts->rel_tol;
    quad.max_subdiv = opts->max_subdiv;
    quad.balakrishnan_split = opts->balakrishnan_split;
    quad.tail_cut = opts->tail_cut;
  }
  quad.validate();
  return quad;
}

const ModelSpec& model_of(const hk_model* model) {
  require(model != nullptr, errc::invalid_argument, "null model handle");
  return model->spec;
}

}  // namespace

extern "C" {

const char* hk_version(void) { return "hypokernel 1.0.0"; }

const char* hk_last_error(void) { return g_last_error.c_str(); }

void hk_string_free(char* s) { std::free(s); }

void hk_quad_options_default(hk_quad_options* opts) {
  if (!opts) return;
  const QuadratureConfig quad;
  opts->gh_nodes = quad.gh_nodes;
  opts->abs_tol = quad.abs_tol;
  opts->rel_tol = quad.rel_tol;
  opts->max_subdiv = quad.max_subdiv;
  opts->balakrishnan_split = quad.balakrishnan_split;
  opts->tail_cut = quad.tail_cut;
}

hk_status hk_model_create(int n, const double* q_rowmajor, const double* b_rowmajor,
                          hk_model** out) {
  return guarded([&] {
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    require(n >= 1, errc::invalid_argument, "model dimension must be >= 1");
    *out = new hk_model{ModelSpec::create(matrix_from(q_rowmajor, n), matrix_from(b_rowmajor, n))};
  });
}

void hk_model_free(hk_model* model) { delete model; }

int hk_model_dim(const hk_model* model) { return model ? model->spec.n : 0; }

double hk_model_trace_b(const hk_model* model) { return model ? model->spec.trace_b : 0.0; }

hk_status hk_model_kalman_rank(const hk_model* model, int* rank) {
  return guarded([&] {
    require(rank != nullptr, errc::invalid_argument, "null output pointer");
    *rank = kalman_rank(model_of(model).q, model_of(model).b);
  });
}

hk_status hk_model_is_hypoelliptic(const hk_model* model, int* flag) {
  return guarded([&] {
    require(flag != nullptr, errc::invalid_argument, "null output pointer");
    const auto& spec = model_of(model);
    *flag = (kalman_rank(spec.q, spec.b) == spec.n) ? 1 : 0;
  });
}

hk_status hk_hypo_report_json(const hk_model* model, const double* times, int n_times,
                              char** json_out) {
  return guarded([&] {
    require(json_out != nullptr, errc::invalid_argument, "null output pointer");
    const auto& spec = model_of(model);
    HypoReport report;
    if (times && n_times > 0)
      report = hypo_report(spec, std::vector<double>(times, times + n_times));
    else
      report = hypo_report(spec);
    *json_out = dup_string(hypo_report_json(report, spec.n));
  });
}

hk_status hk_gramian_c(const hk_model* model, double t, double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    const Matrix c = gramian_C(spec, t);
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.n; ++j) out[i * spec.n + j] = c(i, j);
  });
}

hk_status hk_gramian_k(const hk_model* model, double t, double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    const Matrix k = gramian_K(spec, t);
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.n; ++j) out[i * spec.n + j] = k(i, j);
  });
}

hk_status hk_lyapunov_residual(const hk_model* model, double t, double* out) {
  return guarded([&] {
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    *out = lyapunov_residual(model_of(model), t);
  });
}

hk_status hk_function_create(int n, const double* center, const double* shape_rowmajor,
                             int n_terms, const int* exponents, const double* coeffs,
                             double amplitude, hk_function** out) {
  return guarded([&] {
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    require(n >= 1, errc::invalid_argument, "function dimension must be >= 1");
    Poly poly(n);
    if (n_terms == 0) {
      poly = Poly::constant(n, 1.0);
    } else {
      require(exponents != nullptr && coeffs != nullptr, errc::invalid_argument,
              "null polynomial data");
      for (int t = 0; t < n_terms; ++t) {
        std::vector<int> e(exponents + t * n, exponents + (t + 1) * n);
        poly.add_term(e, coeffs[t]);
      }
    }
    *out = new hk_function{GaussPolyFunction::create(
        vector_from(center, n), matrix_from(shape_rowmajor, n), std::move(poly), amplitude)};
  });
}

hk_status hk_function_tensor_time(const hk_function* space, double t_center, double t_shape,
                                  hk_function** out) {
  return guarded([&] {
    require(space != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    Vector tc(1);
    tc(0) = t_center;
    Matrix ts(1, 1);
    ts(0, 0) = t_shape;
    const auto time1d = GaussPolyFunction::pure_gaussian(tc, ts, 1.0);
    *out = new hk_function{SpaceTimeGaussPoly::tensor(space->spatial(), time1d)};
  });
}

hk_status hk_function_time_constant(const hk_function* space, hk_function** out) {
  return guarded([&] {
    require(space != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    *out = new hk_function{SpaceTimeGaussPoly::time_constant(space->spatial())};
  });
}

void hk_function_free(hk_function* f) { delete f; }

hk_status hk_function_eval(const hk_function* f, const double* x, double t, double* out) {
  return guarded([&] {
    require(f != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    if (std::holds_alternative<GaussPolyFunction>(f->value)) {
      const auto& g = std::get<GaussPolyFunction>(f->value);
      *out = g.eval(vector_from(x, g.n));
    } else {
      const auto& u = std::get<SpaceTimeGaussPoly>(f->value);
      *out = u.eval(vector_from(x, u.space_dim), t);
    }
  });
}

hk_status hk_hormander_kernel(const hk_model* model, const double* x, const double* y, double t,
                              hk_kernel_form form, double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    *out = hormander_kernel(spec, vector_from(x, spec.n), vector_from(y, spec.n), t,
                            form == HK_KERNEL_C_FORM ? KernelForm::c_form : KernelForm::k_form);
  });
}

hk_status hk_hormander_kernel_grad_x(const hk_model* model, const double* x, const double* y,
                                     double t, double* out_vec) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(out_vec != nullptr, errc::invalid_argument, "null output pointer");
    const Vector g =
        hormander_kernel_gradX(spec, vector_from(x, spec.n), vector_from(y, spec.n), t);
    for (int i = 0; i < spec.n; ++i) out_vec[i] = g(i);
  });
}

hk_status hk_kolmogorov_kernel(int n, const double* v, const double* x, const double* w,
                               const double* y, double t, double* out) {
  return guarded([&] {
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    *out = kolmogorov_kernel_explicit(vector_from(v, n), vector_from(x, n), vector_from(w, n),
                                      vector_from(y, n), t, n);
  });
}

hk_status hk_bessel_i(double nu, double x, double* out) {
  return guarded([&] {
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    *out = bessel_i(nu, x);
  });
}

hk_status hk_bessel_i_scaled(double nu, double x, double* out) {
  return guarded([&] {
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    *out = bessel_i_scaled(nu, x);
  });
}

hk_status hk_bessel_heat_kernel(double a, double z, double zeta, double t, double* out) {
  return guarded([&] {
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    *out = bessel_heat_kernel(a, z, zeta, t);
  });
}

hk_status hk_g_profile(double a, double z, double t, double* out) {
  return guarded([&] {
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    *out = g_profile(a, z, t);
  });
}

hk_status hk_neumann_g(const hk_model* model, double a, const double* x, double t, double z,
                       const double* y, double tau, double zeta, double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    *out = neumann_G(spec, a, vector_from(x, spec.n), t, z, vector_from(y, spec.n), tau, zeta);
  });
}

hk_status hk_poisson_time_kernel(const hk_model* model, double a, const double* x,
                                 const double* y, double t, double z, double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    *out = poisson_time_kernel(spec, a, vector_from(x, spec.n), vector_from(y, spec.n), t, z);
  });
}

hk_status hk_poisson_space_kernel(const hk_model* model, double a, const double* x,
                                  const double* y, double z, const hk_quad_options* quad,
                                  double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(out != nullptr, errc::invalid_argument, "null output pointer");
    *out = poisson_space_kernel(spec, a, vector_from(x, spec.n), vector_from(y, spec.n), z,
                                quad_from(quad));
  });
}

hk_status hk_apply_pt(const hk_function* f, const hk_model* model, const double* x, double t,
                      const hk_quad_options* quad, double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(f != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    *out = apply_Pt(f->spatial(), spec, vector_from(x, spec.n), t, quad_from(quad));
  });
}

hk_status hk_apply_pt_gauss_exact(const hk_function* f, const hk_model* model, const double* x,
                                  double t, double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(f != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    *out = apply_Pt_gauss_exact(f->spatial(), spec, vector_from(x, spec.n), t);
  });
}

hk_status hk_apply_pk(const hk_function* u, const hk_model* model, const double* x, double t,
                      double tau, const hk_quad_options* quad, double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(u != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    *out = apply_PK(u->spacetime(), spec, vector_from(x, spec.n), t, tau, quad_from(quad));
  });
}

hk_status hk_resolvent(const hk_function* f, const hk_model* model, double lambda,
                       const double* x, const hk_quad_options* quad, double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(f != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    *out = resolvent_apply(f->spatial(), spec, lambda, vector_from(x, spec.n), quad_from(quad));
  });
}

hk_status hk_rate_check_json(const hk_function* f, const hk_model* model, const double* t_grid,
                             int n_t, const double* x_grid_rowmajor, int n_x,
                             const hk_quad_options* quad, char** json_out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(f != nullptr && json_out != nullptr && t_grid != nullptr &&
                x_grid_rowmajor != nullptr && n_t > 0 && n_x > 0,
            errc::invalid_argument, "null pointer or empty grid");
    std::vector<double> ts(t_grid, t_grid + n_t);
    std::vector<Vector> xs;
    for (int i = 0; i < n_x; ++i) xs.push_back(vector_from(x_grid_rowmajor + i * spec.n, spec.n));
    const RateReport report = rate_check(f->spatial(), spec, ts, xs, quad_from(quad));
    std::string json = "{\n  \"all_ok\": ";
    json += report.all_ok ? "true" : "false";
    json += ",\n  \"slope_smallest\": " + std::to_string(report.slope_smallest);
    json += ",\n  \"rows\": [";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      const auto& row = report.rows[i];
      if (i) json += ",";
      json += "\n    {\"t\": " + std::to_string(row.t) +
              ", \"sup_delta\": " + std::to_string(row.sup_delta) +
              ", \"bound\": " + std::to_string(row.bound) +
              ", \"margin\": " + std::to_string(row.margin) + "}";
    }
    json += "\n  ]\n}\n";
    *json_out = dup_string(json);
  });
}

hk_status hk_frac_a(const hk_function* f, const hk_model* model, const double* x, double s,
                    const hk_quad_options* quad, double* out, double* tail_bound_out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(f != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    const FracResult r = frac_A(f->spatial(), spec, vector_from(x, spec.n), s, quad_from(quad));
    *out = r.value;
    if (tail_bound_out) *tail_bound_out = r.tail_bound;
  });
}

hk_status hk_frac_k(const hk_function* u, const hk_model* model, const double* x, double t,
                    double s, const hk_quad_options* quad, double* out, double* tail_bound_out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(u != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    const FracResult r =
        frac_K(u->spacetime(), spec, vector_from(x, spec.n), t, s, quad_from(quad));
    *out = r.value;
    if (tail_bound_out) *tail_bound_out = r.tail_bound;
  });
}

hk_status hk_frac_heat_oracle(const hk_function* f, const double* x, double s,
                              const hk_quad_options* quad, double* out) {
  return guarded([&] {
    require(f != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    const auto& g = f->spatial();
    *out = frac_heat_oracle(g, vector_from(x, g.n), s, quad_from(quad));
  });
}

hk_status hk_extend_k(const hk_function* u, const hk_model* model, const double* x, double t,
                      double z, double a, const hk_quad_options* quad, double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(u != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    *out = extend_K(u->spacetime(), spec, vector_from(x, spec.n), t, z, a, quad_from(quad));
  });
}

hk_status hk_extend_a(const hk_function* f, const hk_model* model, const double* x, double z,
                      double a, const hk_quad_options* quad, double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(f != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    *out = extend_A(f->spatial(), spec, vector_from(x, spec.n), z, a, quad_from(quad));
  });
}

hk_status hk_dtn_k(const hk_function* u, const hk_model* model, const double* x, double t,
                   double s, double z, const hk_quad_options* quad, double* out) {
  return guarded([&] {
    const auto& spec = model_of(model);
    require(u != nullptr && out != nullptr, errc::invalid_argument, "null pointer");
    *out = dtn_K(u->spacetime(), spec, vector_from(x, spec.n), t, s, z, quad_from(quad));
  });
}

int hk_cmd_check(const char* config_json, char** output) {
  std::string text;
  const int code = cmd_check(config_json ? config_json : "", text);
  if (output) *output = dup_string(text);
  return code;
}

int hk_cmd_eval(const char* config_json, const char* what, char** output) {
  std::string text;
  const int code = cmd_eval(config_json ? config_json : "", what ? what : "", text);
  if (output) *output = dup_string(text);
  return code;
}

int hk_cmd_verify(const char* config_json, const char* suite, char** output) {
  std::string text;
  const int code = cmd_verify(config_json ? config_json : "", suite ? suite : "", text);
  if (output) *output = dup_string(text);
  return code;
}

}  // extern "C"
