#include "core/commands.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

namespace hk {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int thread_budget(std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("HYPOKERNEL_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(std::min<std::size_t>(hw, jobs));
}

// per-index parallelism with deterministic, input-ordered results
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const int threads = thread_budget(count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += threads) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case errc::parse_error:
    case errc::invalid_argument:
    case errc::domain_error:
    case errc::degree_overflow:
    case errc::dimension_limit:
      return kExitUsage;
    case errc::not_positive_definite:
    case errc::not_hypoelliptic:
      return kExitPrecondition;
    default:
      return kExitUsage;
  }
}

using Row = std::vector<double>;

std::string to_csv(const std::vector<std::string>& header, const std::vector<Row>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ",";
    out << header[i];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << fmt17(row[i]);
    }
    out << "\n";
  }
  return out.str();
}

void require_hypoelliptic(const ModelSpec& model) {
  require(kalman_rank(model.q, model.b) == model.n, errc::not_hypoelliptic,
          "model is not hypoelliptic (Kalman rank deficient)");
}

std::vector<Vector> eval_points(const RunConfig& config, int expected_dim) {
  if (!config.points.empty()) {
    for (const auto& p : config.points)
      require(p.size() == expected_dim, errc::parse_error,
              "eval.points must have length " + std::to_string(expected_dim));
    return config.points;
  }
  require(expected_dim == config.model.n, errc::parse_error,
          "this eval target requires explicit eval.points");
  return {battery_point(config.model.n)};
}

}  // namespace

int cmd_check(const std::string& config_json, std::string& output) {
  try {
    const RunConfig config = parse_config(config_json);
    const auto report = config.sample_times.empty()
                            ? hypo_report(config.model)
                            : hypo_report(config.model, config.sample_times);
    output = hypo_report_json(report, config.model.n);
    return report.is_hypoelliptic ? kExitOk : kExitPrecondition;
  } catch (const Error& e) {
    output = std::string("error: ") + e.what();
    return exit_code_for(e);
  } catch (const std::exception& e) {
    output = std::string("error: ") + e.what();
    return kExitUsage;
  }
}

int cmd_eval(const std::string& config_json, const std::string& what, std::string& output) {
  std::atomic<std::size_t> failing_row{static_cast<std::size_t>(-1)};
  try {
    const RunConfig config = parse_config(config_json);
    const ModelSpec& model = config.model;
    const int n = model.n;
    std::vector<std::string> header;
    std::vector<Row> rows;
    auto coord_header = [&](const std::string& prefix) {
      for (int i = 0; i < n; ++i) header.push_back(prefix + std::to_string(i + 1));
    };
    auto guarded = [&](std::size_t count, const std::function<void(std::size_t)>& body) {
      parallel_for(count, [&](std::size_t i) {
        try {
          body(i);
        } catch (...) {
          std::size_t prev = failing_row.load();
          while (i < prev && !failing_row.compare_exchange_weak(prev, i)) {
          }
          throw;
        }
      });
    };

    if (what == "kernel") {
      require_hypoelliptic(model);
      const auto points = eval_points(config, 2 * n);
      coord_header("x");
      coord_header("y");
      header.insert(header.end(), {"t", "p_kform", "p_cform", "rel_diff"});
      rows.resize(points.size());
      guarded(points.size(), [&](std::size_t i) {
        const Vector x = points[i].head(n);
        const Vector y = points[i].tail(n);
        const double t = config.t_eval;
        const double pk = hormander_kernel(model, x, y, t, KernelForm::k_form);
        const double pc = hormander_kernel(model, x, y, t, KernelForm::c_form);
        Row row;
        for (int k = 0; k < n; ++k) row.push_back(x(k));
        for (int k = 0; k < n; ++k) row.push_back(y(k));
        row.push_back(t);
        row.push_back(pk);
        row.push_back(pc);
        row.push_back(std::abs(pk - pc) / std::max({pk, pc, 1e-300}));
        rows[i] = std::move(row);
      });
    } else if (what == "semigroup") {
      require_hypoelliptic(model);
      require(config.function.has_value(), errc::parse_error,
              "semigroup eval requires a 'function' block");
      const auto points = eval_points(config, n);
      coord_header("x");
      header.insert(header.end(), {"t", "pt_value"});
      rows.resize(points.size());
      guarded(points.size(), [&](std::size_t i) {
        Row row;
        for (int k = 0; k < n; ++k) row.push_back(points[i](k));
        row.push_back(config.t_eval);
        row.push_back(apply_Pt(*config.function, model, points[i], config.t_eval, config.quad));
        rows[i] = std::move(row);
      });
    } else if (what == "frac") {
      require_hypoelliptic(model);
      require(config.s.has_value(), errc::parse_error, "frac eval requires fractional.s");
      FractionalParams::from_s(*config.s);
      require(config.function.has_value() || config.u.has_value(), errc::parse_error,
              "frac eval requires a 'function' or 'u' block");
      const auto points = eval_points(config, n);
      coord_header("x");
      header.insert(header.end(), {"s", "value", "tail_t", "tail_bound"});
      rows.resize(points.size());
      guarded(points.size(), [&](std::size_t i) {
        FracResult r;
        if (config.u)
          r = frac_K(*config.u, model, points[i], config.t_eval, *config.s, config.quad);
        else
          r = frac_A(*config.function, model, points[i], *config.s, config.quad);
        Row row;
        for (int k = 0; k < n; ++k) row.push_back(points[i](k));
        row.push_back(*config.s);
        row.push_back(r.value);
        row.push_back(r.tail_t);
        row.push_back(r.tail_bound);
        rows[i] = std::move(row);
      });
    } else if (what == "extend") {
      require_hypoelliptic(model);
      require(config.function.has_value() || config.u.has_value(), errc::parse_error,
              "extend eval requires a 'function' or 'u' block");
      const double a =
          config.s.has_value() ? FractionalParams::from_s(*config.s).a : 0.0;
      FractionalParams::from_a(a);
      const auto points = eval_points(config, n);
      coord_header("x");
      header.insert(header.end(), {"t", "z", "a", "value"});
      rows.resize(points.size());
      guarded(points.size(), [&](std::size_t i) {
        double value;
        if (config.u)
          value = extend_K(*config.u, model, points[i], config.t_eval, config.z_eval, a,
                           config.quad);
        else
          value = extend_A(*config.function, model, points[i], config.z_eval, a, config.quad);
        Row row;
        for (int k = 0; k < n; ++k) row.push_back(points[i](k));
        row.push_back(config.u ? config.t_eval : 0.0);
        row.push_back(config.z_eval);
        row.push_back(a);
        row.push_back(value);
        rows[i] = std::move(row);
      });
    } else if (what == "dtn") {
      require_hypoelliptic(model);
      require(config.s.has_value(), errc::parse_error, "dtn eval requires fractional.s");
      FractionalParams::from_s(*config.s);
      require(config.u.has_value() || config.function.has_value(), errc::parse_error,
              "dtn eval requires a 'u' or 'function' block");
      require(!config.z_grid.empty(), errc::parse_error, "dtn eval requires eval.z_grid");
      const SpaceTimeGaussPoly u =
          config.u ? *config.u : SpaceTimeGaussPoly::time_constant(*config.function);
      const Vector x = eval_points(config, n).front();
      const double frac_value = frac_K(u, model, x, config.t_eval, *config.s, config.quad).value;
      header = {"z", "dtn_value", "frac_value", "abs_err"};
      rows.resize(config.z_grid.size());
      guarded(config.z_grid.size(), [&](std::size_t i) {
        const double z = config.z_grid[i];
        const double d = dtn_K(u, model, x, config.t_eval, *config.s, z, config.quad);
        Row row;
        row.push_back(z);
        row.push_back(d);
        row.push_back(frac_value);
        row.push_back(std::abs(d - frac_value));
        rows[i] = std::move(row);
      });
    } else {
      throw Error(errc::invalid_argument,
                  "unknown eval target '" + what +
                      "' (expected kernel|semigroup|frac|extend|dtn)");
    }
    output = to_csv(header, rows);
    return kExitOk;
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "error: " << e.what();
    const std::size_t row = failing_row.load();
    if (row != static_cast<std::size_t>(-1)) msg << " (point index " << row << ")";
    output = msg.str();
    return exit_code_for(e);
  } catch (const std::exception& e) {
    output = std::string("error: ") + e.what();
    return kExitUsage;
  }
}

int cmd_verify(const std::string& config_json, const std::string& suite, std::string& output) {
  try {
    const RunConfig config = parse_config(config_json);
    require(suite == "kernels" || suite == "semigroup" || suite == "fractional" ||
                suite == "extension" || suite == "all",
            errc::invalid_argument,
            "unknown suite '" + suite + "' (expected kernels|semigroup|fractional|extension|all)");
    require_hypoelliptic(config.model);

    // a suite aborted by a numerical failure still yields a (red) report
    auto run_suite = [&](const char* name,
                         SuiteReport (*fn)(const ModelSpec&, const QuadratureConfig&)) {
      try {
        return fn(config.model, config.quad);
      } catch (const Error& e) {
        SuiteReport failed;
        failed.suite = name;
        failed.add(std::string("suite aborted: ") + e.what(), 1.0, 0.0);
        return failed;
      }
    };
    std::vector<SuiteReport> suites;
    if (suite == "kernels" || suite == "all")
      suites.push_back(run_suite("kernels", verify_kernels));
    if (suite == "semigroup" || suite == "all")
      suites.push_back(run_suite("semigroup", verify_semigroup));
    if (suite == "fractional" || suite == "all")
      suites.push_back(run_suite("fractional", verify_fractional));
    if (suite == "extension" || suite == "all")
      suites.push_back(run_suite("extension", verify_extension));

    output = suites_json(suites);
    for (const auto& s : suites)
      if (!s.all_pass) return kExitVerifyFailed;
    return kExitOk;
  } catch (const Error& e) {
    output = std::string("error: ") + e.what();
    return exit_code_for(e);
  } catch (const std::exception& e) {
    output = std::string("error: ") + e.what();
    return kExitUsage;
  }
}

}  // namespace hk
