#pragma once

#include <optional>
#include <string>

#include "core/verify.hpp"

namespace hk {

// Parsed run configuration. Parsing is strict: unknown keys are rejected,
// matrices must be rectangular and dimension-consistent.
struct RunConfig {
  ModelSpec model;
  std::optional<double> s;
  QuadratureConfig quad;
  std::optional<GaussPolyFunction> function;
  std::optional<SpaceTimeGaussPoly> u;
  std::vector<Vector> points;
  std::vector<double> z_grid;
  std::vector<double> t_grid;
  std::vector<double> sample_times;
  double t_eval = 1.0;
  double z_eval = 0.5;
  double lambda = 1.0;
  bool has_eval_block = false;
};

RunConfig parse_config(const std::string& json_text);
std::string serialize_config(const RunConfig& config);

std::string hypo_report_json(const HypoReport& report, int n);
std::string suites_json(const std::vector<SuiteReport>& suites);

}  // namespace hk
