// pirm: command-line front end over the C API.
//
//   pirm solve <config.json> [--out DIR] [--strict] [--threads N]
//   pirm validate <config.json>
//   pirm compare <trace.csv> <trace.csv> ...
//
// Exit codes: 0 ok, 1 solver failure, 2 config error, 3 strict-validator failure.

#include "pirm/pirm.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

int exit_code(pirm_status s) {
  switch (s) {
  case PIRM_OK:
    return 0;
  case PIRM_CONFIG_ERROR:
  case PIRM_INVALID_ARGUMENT:
    return 2;
  case PIRM_STRICT_VIOLATION:
    return 3;
  default:
    return 1;
  }
}

void print_and_free(char* text) {
  if (!text) return;
  std::fputs(text, stdout);
  std::fputc('\n', stdout);
  pirm_string_free(text);
}

int report(pirm_status s, const char* what) {
  if (s != PIRM_OK) std::fprintf(stderr, "pirm %s: %s\n", what, pirm_last_error());
  return exit_code(s);
}

int cmd_solve(const std::string& config, const std::string& out, bool strict, int threads) {
  pirm_experiment* exp = nullptr;
  pirm_status s = pirm_experiment_load(config.c_str(), &exp);
  if (s != PIRM_OK) return report(s, "solve");
  char* summary = nullptr;
  s = pirm_experiment_solve(exp, out.empty() ? nullptr : out.c_str(), strict ? 1 : -1, threads,
                            &summary);
  print_and_free(summary);
  pirm_experiment_free(exp);
  return report(s, "solve");
}

int cmd_validate(const std::string& config) {
  pirm_experiment* exp = nullptr;
  pirm_status s = pirm_experiment_load(config.c_str(), &exp);
  if (s != PIRM_OK) return report(s, "validate");
  char* text = nullptr;
  s = pirm_experiment_validate(exp, &text);
  print_and_free(text);
  pirm_experiment_free(exp);
  return report(s, "validate");
}

int cmd_compare(const std::vector<std::string>& traces) {
  std::vector<const char*> paths;
  for (const auto& t : traces) paths.push_back(t.c_str());
  char* text = nullptr;
  const pirm_status s = pirm_compare_traces(paths.data(), paths.size(), &text);
  print_and_free(text);
  return report(s, "compare");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel regularization solvers for systems of accretive equations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pirm_version()));

  std::string config;
  std::string out;
  bool strict = false;
  int threads = 0;
  auto* solve = app.add_subcommand("solve", "Validate schedules, run the solver and write traces");
  solve->add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out, "Output directory (overrides output.dir)");
  solve->add_flag("--strict", strict, "Refuse to run when a schedule condition is violated");
  solve->add_option("--threads", threads, "Worker threads per step")->check(CLI::Range(1, 256));

  std::string vconfig;
  auto* validate = app.add_subcommand("validate", "Check the schedule conditions only");
  validate->add_option("config", vconfig, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  std::vector<std::string> traces;
  auto* compare = app.add_subcommand("compare", "Compare final errors of CSV traces");
  compare->add_option("traces", traces, "Trace CSV files")->required()->expected(2, -1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*solve) return cmd_solve(config, out, strict, threads);
  if (*validate) return cmd_validate(vconfig);
  if (*compare) return cmd_compare(traces);
  return 2;
}
