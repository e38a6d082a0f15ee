#pragma once

#include <string>

#include "core/extension.hpp"

namespace hk {

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  bool all_pass = true;

  void add(std::string name, double measured, double tolerance, std::string detail = "") {
    const bool ok = measured <= tolerance;
    all_pass = all_pass && ok;
    checks.push_back({std::move(name), measured, tolerance, ok, std::move(detail)});
  }
};

SuiteReport verify_kernels(const ModelSpec& model, const QuadratureConfig& quad);
SuiteReport verify_semigroup(const ModelSpec& model, const QuadratureConfig& quad);
SuiteReport verify_fractional(const ModelSpec& model, const QuadratureConfig& quad);
SuiteReport verify_extension(const ModelSpec& model, const QuadratureConfig& quad);
std::vector<SuiteReport> verify_all(const ModelSpec& model, const QuadratureConfig& quad);

// standard battery: spatial Gaussian e^{-|X|^2/2} and its space-time tensor
// with e^{-t^2/2}
GaussPolyFunction battery_function(int n);
SpaceTimeGaussPoly battery_spacetime(int n);
Vector battery_point(int n);

}  // namespace hk
