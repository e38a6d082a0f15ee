#include "core/config.hpp"

#include <json.hpp>

namespace hk {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  require(j.is_object(), errc::parse_error, "config: " + where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (key == k) ok = true;
    require(ok, errc::parse_error, "config: unknown key '" + key + "' in " + where);
  }
}

Matrix parse_matrix(const json& j, const std::string& where) {
  require(j.is_array() && !j.empty(), errc::parse_error,
          "config: " + where + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Matrix m;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = j[i];
    require(row.is_array(), errc::parse_error, "config: " + where + " rows must be arrays");
    if (i == 0) {
      cols = row.size();
      require(cols > 0, errc::parse_error, "config: " + where + " has empty rows");
      m.resize(rows, cols);
    }
    require(row.size() == cols, errc::parse_error, "config: " + where + " is not rectangular");
    for (std::size_t k = 0; k < cols; ++k) {
      require(row[k].is_number(), errc::parse_error, "config: " + where + " entries must be numbers");
      m(i, k) = row[k].get<double>();
    }
  }
  return m;
}

Vector parse_vector(const json& j, const std::string& where) {
  require(j.is_array(), errc::parse_error, "config: " + where + " must be an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), errc::parse_error, "config: " + where + " entries must be numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

std::vector<double> parse_scalars(const json& j, const std::string& where) {
  const Vector v = parse_vector(j, where);
  return std::vector<double>(v.data(), v.data() + v.size());
}

GaussPolyFunction parse_function(const json& j, const std::string& where) {
  check_keys(j, {"center", "shape", "poly", "amplitude", "degree_cap"}, where);
  require(j.contains("center") && j.contains("shape"), errc::parse_error,
          "config: " + where + " requires center and shape");
  const Vector center = parse_vector(j["center"], where + ".center");
  const Matrix shape = parse_matrix(j["shape"], where + ".shape");
  const int n = static_cast<int>(center.size());
  int cap = 16;
  if (j.contains("degree_cap")) {
    require(j["degree_cap"].is_number_integer(), errc::parse_error,
            "config: " + where + ".degree_cap must be an integer");
    cap = j["degree_cap"].get<int>();
  }
  Poly poly = Poly::constant(n, 0.0);
  if (j.contains("poly")) {
    const auto& terms = j["poly"];
    require(terms.is_array() && !terms.empty(), errc::parse_error,
            "config: " + where + ".poly must be a non-empty array");
    for (const auto& term : terms) {
      check_keys(term, {"exponents", "coeff"}, where + ".poly[]");
      require(term.contains("exponents") && term.contains("coeff"), errc::parse_error,
              "config: " + where + ".poly terms need exponents and coeff");
      const Vector e = parse_vector(term["exponents"], where + ".poly.exponents");
      require(static_cast<int>(e.size()) == n, errc::parse_error,
              "config: " + where + ".poly exponent arity mismatch");
      std::vector<int> exps(n);
      for (int i = 0; i < n; ++i) {
        exps[i] = static_cast<int>(e(i));
        require(exps[i] >= 0 && exps[i] == e(i), errc::parse_error,
                "config: " + where + ".poly exponents must be non-negative integers");
      }
      require(term["coeff"].is_number(), errc::parse_error,
              "config: " + where + ".poly coeff must be a number");
      poly.add_term(exps, term["coeff"].get<double>());
    }
  } else {
    poly = Poly::constant(n, 1.0);
  }
  double amplitude = 1.0;
  if (j.contains("amplitude")) {
    require(j["amplitude"].is_number(), errc::parse_error,
            "config: " + where + ".amplitude must be a number");
    amplitude = j["amplitude"].get<double>();
  }
  return GaussPolyFunction::create(center, shape, std::move(poly), amplitude, cap);
}

json function_to_json(const GaussPolyFunction& f) {
  json j;
  j["center"] = std::vector<double>(f.center.data(), f.center.data() + f.center.size());
  json shape = json::array();
  for (int i = 0; i < f.n; ++i) {
    json row = json::array();
    for (int k = 0; k < f.n; ++k) row.push_back(f.shape(i, k));
    shape.push_back(row);
  }
  j["shape"] = shape;
  json poly = json::array();
  for (const auto& [e, c] : f.poly.terms()) {
    json term;
    term["exponents"] = e;
    term["coeff"] = c.real();
    poly.push_back(term);
  }
  j["poly"] = poly;
  j["amplitude"] = f.amplitude.real();
  j["degree_cap"] = f.degree_cap;
  return j;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(errc::parse_error, std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, {"model", "fractional", "quadrature", "function", "u", "eval", "sample_times"},
             "top level");
  require(j.contains("model"), errc::parse_error, "config: missing required key 'model'");

  RunConfig config;
  {
    const auto& m = j["model"];
    check_keys(m, {"Q", "B"}, "model");
    require(m.contains("Q") && m.contains("B"), errc::parse_error,
            "config: model requires Q and B");
    const Matrix q = parse_matrix(m["Q"], "model.Q");
    const Matrix b = parse_matrix(m["B"], "model.B");
    require(q.rows() == q.cols() && b.rows() == b.cols() && q.rows() == b.rows(),
            errc::parse_error, "config: Q and B must be square matrices of equal order");
    config.model = ModelSpec::create(q, b);
  }
  if (j.contains("fractional")) {
    check_keys(j["fractional"], {"s"}, "fractional");
    require(j["fractional"].contains("s") && j["fractional"]["s"].is_number(), errc::parse_error,
            "config: fractional.s must be a number");
    config.s = j["fractional"]["s"].get<double>();
  }
  if (j.contains("quadrature")) {
    const auto& q = j["quadrature"];
    check_keys(q, {"gh_nodes", "abs_tol", "rel_tol", "max_subdiv", "balakrishnan_split",
                   "tail_cut"},
               "quadrature");
    if (q.contains("gh_nodes")) config.quad.gh_nodes = q["gh_nodes"].get<int>();
    if (q.contains("abs_tol")) config.quad.abs_tol = q["abs_tol"].get<double>();
    if (q.contains("rel_tol")) config.quad.rel_tol = q["rel_tol"].get<double>();
    if (q.contains("max_subdiv")) config.quad.max_subdiv = q["max_subdiv"].get<int>();
    if (q.contains("balakrishnan_split"))
      config.quad.balakrishnan_split = q["balakrishnan_split"].get<double>();
    if (q.contains("tail_cut")) config.quad.tail_cut = q["tail_cut"].get<double>();
    config.quad.validate();
  }
  if (j.contains("function")) config.function = parse_function(j["function"], "function");
  if (j.contains("u")) {
    const auto& ju = j["u"];
    check_keys(ju, {"space", "time", "time_constant"}, "u");
    if (ju.contains("time_constant")) {
      require(!ju.contains("space") && !ju.contains("time"), errc::parse_error,
              "config: u.time_constant excludes space/time");
      config.u = SpaceTimeGaussPoly::time_constant(
          parse_function(ju["time_constant"], "u.time_constant"));
    } else {
      require(ju.contains("space") && ju.contains("time"), errc::parse_error,
              "config: u requires space and time factors");
      const auto space = parse_function(ju["space"], "u.space");
      const auto time1d = parse_function(ju["time"], "u.time");
      require(time1d.n == 1, errc::parse_error, "config: u.time must be one-dimensional");
      config.u = SpaceTimeGaussPoly::tensor(space, time1d);
    }
  }
  if (j.contains("eval")) {
    const auto& e = j["eval"];
    check_keys(e, {"points", "t", "z", "lambda", "z_grid", "t_grid"}, "eval");
    config.has_eval_block = true;
    if (e.contains("points")) {
      require(e["points"].is_array(), errc::parse_error, "config: eval.points must be an array");
      for (const auto& p : e["points"]) config.points.push_back(parse_vector(p, "eval.points[]"));
    }
    if (e.contains("t")) config.t_eval = e["t"].get<double>();
    if (e.contains("z")) config.z_eval = e["z"].get<double>();
    if (e.contains("lambda")) config.lambda = e["lambda"].get<double>();
    if (e.contains("z_grid")) config.z_grid = parse_scalars(e["z_grid"], "eval.z_grid");
    if (e.contains("t_grid")) config.t_grid = parse_scalars(e["t_grid"], "eval.t_grid");
  }
  if (j.contains("sample_times"))
    config.sample_times = parse_scalars(j["sample_times"], "sample_times");
  return config;
}

std::string serialize_config(const RunConfig& config) {
  json j;
  j["model"]["Q"] = matrix_to_json(config.model.q);
  j["model"]["B"] = matrix_to_json(config.model.b);
  if (config.s) j["fractional"]["s"] = *config.s;
  j["quadrature"] = {{"gh_nodes", config.quad.gh_nodes},
                     {"abs_tol", config.quad.abs_tol},
                     {"rel_tol", config.quad.rel_tol},
                     {"max_subdiv", config.quad.max_subdiv},
                     {"balakrishnan_split", config.quad.balakrishnan_split},
                     {"tail_cut", config.quad.tail_cut}};
  if (config.function) j["function"] = function_to_json(*config.function);
  if (config.u) {
    if (config.u->time_constant_flag) {
      j["u"]["time_constant"] =
          function_to_json(config.u->space_slice(config.u->joint.center(config.u->space_dim)));
    } else {
      j["u"]["space"] = function_to_json(config.u->space_slice(
          config.u->joint.center(config.u->space_dim)));
      // reconstruct the 1-D time factor
      const int ns = config.u->space_dim;
      Vector tc(1);
      tc(0) = config.u->joint.center(ns);
      Matrix ts(1, 1);
      ts(0, 0) = config.u->joint.shape(ns, ns);
      j["u"]["time"] =
          function_to_json(GaussPolyFunction::pure_gaussian(tc, ts, 1.0));
    }
  }
  if (config.has_eval_block) {
    json e;
    json pts = json::array();
    for (const auto& p : config.points)
      pts.push_back(std::vector<double>(p.data(), p.data() + p.size()));
    e["points"] = pts;
    e["t"] = config.t_eval;
    e["z"] = config.z_eval;
    e["lambda"] = config.lambda;
    if (!config.z_grid.empty()) e["z_grid"] = config.z_grid;
    if (!config.t_grid.empty()) e["t_grid"] = config.t_grid;
    j["eval"] = e;
  }
  if (!config.sample_times.empty()) j["sample_times"] = config.sample_times;
  return j.dump(2);
}

std::string hypo_report_json(const HypoReport& report, int n) {
  json j;
  j["N"] = n;
  j["kalman_rank"] = report.kalman_rank;
  j["is_hypoelliptic"] = report.is_hypoelliptic;
  j["trace_B"] = report.trace_b;
  j["lp_contractive"] = report.lp_contractive;
  json samples = json::array();
  for (const auto& [t, eig] : report.sampled_min_eig_k) samples.push_back({t, eig});
  j["sampled_min_eig_K"] = samples;
  return j.dump(2);
}

std::string suites_json(const std::vector<SuiteReport>& suites) {
  json j;
  bool all = true;
  json arr = json::array();
  for (const auto& suite : suites) {
    json s;
    s["suite"] = suite.suite;
    s["all_pass"] = suite.all_pass;
    all = all && suite.all_pass;
    json checks = json::array();
    for (const auto& check : suite.checks) {
      json c;
      c["name"] = check.name;
      c["measured"] = check.measured;
      c["tolerance"] = check.tolerance;
      c["pass"] = check.pass;
      if (!check.detail.empty()) c["detail"] = check.detail;
      checks.push_back(c);
    }
    s["checks"] = checks;
    arr.push_back(s);
  }
  j["suites"] = arr;
  j["all_pass"] = all;
  return j.dump(2);
}

}  // namespace hk
