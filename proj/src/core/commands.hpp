#pragma once

#include "core/config.hpp"

namespace hk {

// Exit-code contract: 0 ok, 1 usage/parse error, 2 precondition violated,
// 3 verification failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitVerifyFailed = 3;

int cmd_check(const std::string& config_json, std::string& output);
int cmd_eval(const std::string& config_json, const std::string& what, std::string& output);
int cmd_verify(const std::string& config_json, const std::string& suite, std::string& output);

}  // namespace hk
