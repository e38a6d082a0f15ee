// hypokernel command-line front end. All functionality lives behind the
// shared library's C API; this binary only parses arguments, reads the
// config file, and writes the report.

#include <CLI11.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "hypokernel/hypokernel.h"

namespace {

int read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open config file '" << path << "'\n";
    return 1;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return 0;
}

int write_output(const std::string& path, const char* text) {
  if (path.empty()) {
    std::cout << text;
    if (*text && text[strlen(text) - 1] != '\n') std::cout << "\n";
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file '" << path << "'\n";
    return 1;
  }
  out << text;
  return 0;
}

int run_command(int code, char* output, const std::string& out_path) {
  if (!output) {
    std::cerr << "error: no output produced\n";
    return 1;
  }
  int rc = code;
  if (strncmp(output, "error: ", 7) == 0) {
    std::cerr << output << "\n";
  } else {
    if (write_output(out_path, output) != 0 && rc == 0) rc = 1;
  }
  hk_string_free(output);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypoelliptic Kolmogorov kernels, fractional powers, and extension problems"};
  app.set_version_flag("--version", std::string(hk_version()));
  app.require_subcommand(1);

  std::string config_path, output_path, what = "kernel", suite = "all";

  auto* check = app.add_subcommand("check", "hypoellipticity report (exit 0 yes / 2 no)");
  check->add_option("-c,--config", config_path, "JSON config with the model")->required();
  check->add_option("-o,--output", output_path, "output file (default stdout)");

  auto* eval = app.add_subcommand("eval", "evaluate kernels/semigroups/fractional powers to CSV");
  eval->add_option("-c,--config", config_path, "JSON run config")->required();
  eval->add_option("--what", what, "kernel|semigroup|frac|extend|dtn")->required();
  eval->add_option("-o,--output", output_path, "output CSV file (default stdout)");

  auto* verify = app.add_subcommand("verify", "run an invariant suite (exit 3 on failure)");
  verify->add_option("-c,--config", config_path, "JSON config with the model")->required();
  verify->add_option("--suite", suite, "kernels|semigroup|fractional|extension|all");
  verify->add_option("-o,--output", output_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  std::string config;
  if (read_file(config_path, config) != 0) return 1;

  char* output = nullptr;
  int code = 0;
  if (check->parsed()) {
    code = hk_cmd_check(config.c_str(), &output);
  } else if (eval->parsed()) {
    code = hk_cmd_eval(config.c_str(), what.c_str(), &output);
  } else {
    code = hk_cmd_verify(config.c_str(), suite.c_str(), &output);
  }
  return run_command(code, output, output_path);
}
