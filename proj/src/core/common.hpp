#pragma once

#include <stdexcept>
#include <string>

namespace hk {

enum class errc {
  ok = 0,
  invalid_argument,
  parse_error,
  not_positive_definite,
  not_hypoelliptic,
  quadrature_not_converged,
  domain_error,
  degree_overflow,
  dimension_limit,
  internal,
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace hk
