/* hypokernel: hypoelliptic Kolmogorov operators, Gaussian transition kernels,
 * fractional powers by Balakrishnan quadrature, and extension-problem
 * Poisson kernels with Dirichlet-to-Neumann verification.
 *
 * C API of the shared library. All handles are opaque; every function
 * returns an hk_status, writes results through out-parameters, and leaves a
 * thread-local message retrievable with hk_last_error() on failure.
 * Matrices are row-major double arrays.
 */
#ifndef HYPOKERNEL_H
#define HYPOKERNEL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hk_status {
  HK_OK = 0,
  HK_ERR_INVALID_ARGUMENT = 1,
  HK_ERR_PARSE = 2,
  HK_ERR_NOT_POSITIVE_DEFINITE = 3,
  HK_ERR_NOT_HYPOELLIPTIC = 4,
  HK_ERR_QUADRATURE = 5,
  HK_ERR_DOMAIN = 6,
  HK_ERR_DEGREE_OVERFLOW = 7,
  HK_ERR_DIMENSION_LIMIT = 8,
  HK_ERR_INTERNAL = 9
} hk_status;

const char* hk_version(void);
/* thread-local message from the most recent failing call */
const char* hk_last_error(void);

/* strings returned through char** out-parameters are heap-allocated */
void hk_string_free(char* s);

/* ---- quadrature options (plain struct, no handle) ---- */
typedef struct hk_quad_options {
  int gh_nodes;
  double abs_tol;
  double rel_tol;
  int max_subdiv;
  double balakrishnan_split;
  double tail_cut;
} hk_quad_options;

void hk_quad_options_default(hk_quad_options* opts);

/* ---- model (Q, B) ---- */
typedef struct hk_model hk_model;

hk_status hk_model_create(int n, const double* q_rowmajor, const double* b_rowmajor,
                          hk_model** out);
void hk_model_free(hk_model* model);
int hk_model_dim(const hk_model* model);
double hk_model_trace_b(const hk_model* model);
hk_status hk_model_kalman_rank(const hk_model* model, int* rank);
hk_status hk_model_is_hypoelliptic(const hk_model* model, int* flag);
/* JSON hypoellipticity report; times may be NULL to use the default grid */
hk_status hk_hypo_report_json(const hk_model* model, const double* times, int n_times,
                              char** json_out);

/* gramians; out buffers hold n*n doubles */
hk_status hk_gramian_c(const hk_model* model, double t, double* out);
hk_status hk_gramian_k(const hk_model* model, double t, double* out);
hk_status hk_lyapunov_residual(const hk_model* model, double t, double* out);

/* ---- test functions (polynomial x Gaussian) ---- */
typedef struct hk_function hk_function;

/* spatial function: amplitude * poly(X - center) * exp(-<M(X-c), X-c>);
 * exponents is n_terms x n (row-major), coeffs has n_terms entries */
hk_status hk_function_create(int n, const double* center, const double* shape_rowmajor,
                             int n_terms, const int* exponents, const double* coeffs,
                             double amplitude, hk_function** out);
/* space-time function: spatial factor tensor a 1-D Gaussian in t */
hk_status hk_function_tensor_time(const hk_function* space, double t_center, double t_shape,
                                  hk_function** out);
/* constant-in-time extension of a spatial function */
hk_status hk_function_time_constant(const hk_function* space, hk_function** out);
void hk_function_free(hk_function* f);
hk_status hk_function_eval(const hk_function* f, const double* x, double t, double* out);

/* ---- kernels ---- */
typedef enum hk_kernel_form { HK_KERNEL_K_FORM = 0, HK_KERNEL_C_FORM = 1 } hk_kernel_form;

hk_status hk_hormander_kernel(const hk_model* model, const double* x, const double* y, double t,
                              hk_kernel_form form, double* out);
hk_status hk_hormander_kernel_grad_x(const hk_model* model, const double* x, const double* y,
                                     double t, double* out_vec);
hk_status hk_kolmogorov_kernel(int n, const double* v, const double* x, const double* w,
                               const double* y, double t, double* out);
hk_status hk_bessel_i(double nu, double x, double* out);
hk_status hk_bessel_i_scaled(double nu, double x, double* out);
hk_status hk_bessel_heat_kernel(double a, double z, double zeta, double t, double* out);
hk_status hk_g_profile(double a, double z, double t, double* out);
hk_status hk_neumann_g(const hk_model* model, double a, const double* x, double t, double z,
                       const double* y, double tau, double zeta, double* out);
hk_status hk_poisson_time_kernel(const hk_model* model, double a, const double* x,
                                 const double* y, double t, double z, double* out);
hk_status hk_poisson_space_kernel(const hk_model* model, double a, const double* x,
                                  const double* y, double z, const hk_quad_options* quad,
                                  double* out);

/* ---- semigroups ---- */
hk_status hk_apply_pt(const hk_function* f, const hk_model* model, const double* x, double t,
                      const hk_quad_options* quad, double* out);
hk_status hk_apply_pt_gauss_exact(const hk_function* f, const hk_model* model, const double* x,
                                  double t, double* out);
hk_status hk_apply_pk(const hk_function* u, const hk_model* model, const double* x, double t,
                      double tau, const hk_quad_options* quad, double* out);
hk_status hk_resolvent(const hk_function* f, const hk_model* model, double lambda,
                       const double* x, const hk_quad_options* quad, double* out);
/* JSON report with per-t rate margins */
hk_status hk_rate_check_json(const hk_function* f, const hk_model* model, const double* t_grid,
                             int n_t, const double* x_grid_rowmajor, int n_x,
                             const hk_quad_options* quad, char** json_out);

/* ---- fractional powers ---- */
hk_status hk_frac_a(const hk_function* f, const hk_model* model, const double* x, double s,
                    const hk_quad_options* quad, double* out, double* tail_bound_out);
hk_status hk_frac_k(const hk_function* u, const hk_model* model, const double* x, double t,
                    double s, const hk_quad_options* quad, double* out, double* tail_bound_out);
hk_status hk_frac_heat_oracle(const hk_function* f, const double* x, double s,
                              const hk_quad_options* quad, double* out);

/* ---- extension problem / DtN ---- */
hk_status hk_extend_k(const hk_function* u, const hk_model* model, const double* x, double t,
                      double z, double a, const hk_quad_options* quad, double* out);
hk_status hk_extend_a(const hk_function* f, const hk_model* model, const double* x, double z,
                      double a, const hk_quad_options* quad, double* out);
hk_status hk_dtn_k(const hk_function* u, const hk_model* model, const double* x, double t,
                   double s, double z, const hk_quad_options* quad, double* out);

/* ---- command layer (all CLI logic lives behind the library) ----
 * Each returns the process exit code: 0 ok, 1 usage/parse, 2 precondition,
 * 3 verification failure. *output is always set (report or error text). */
int hk_cmd_check(const char* config_json, char** output);
int hk_cmd_eval(const char* config_json, const char* what, char** output);
int hk_cmd_verify(const char* config_json, const char* suite, char** output);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HYPOKERNEL_H */
