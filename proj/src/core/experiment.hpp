#pragma once

#include "config.hpp"
#include "schedules.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace pirm {

enum ExitCode : int {
  kExitOk = 0,
  kExitSolverFailure = 1,
  kExitConfigError = 2,
  kExitStrictViolation = 3,
};

struct ValidationSummary {
  std::vector<ScheduleReport> reports;
  bool violated = false;
  std::string radius_note;

  nlohmann::json to_json() const;
};

nlohmann::json report_to_json(const ScheduleReport& r);

/// Runs the schedule validators that apply to the configured method.
ValidationSummary validate_experiment(const ExperimentConfig& cfg, const BuiltProblem& built);

struct RunOverrides {
  std::optional<std::string> out_dir;
  std::optional<bool> strict;
  std::optional<int> threads;
  /// Write nothing to disk (the summary is still returned).
  bool dry = false;
};

struct ExperimentOutcome {
  int exit_code = kExitOk;
  nlohmann::json summary;
  std::vector<std::string> artifacts;
};

/**
 * Validates, runs and writes validation.json, trace.csv, trace.json
 * (dim <= 50) and summary.json into the output directory. Config problems
 * raise ConfigError; solver failures and strict-mode violations are
 * reported through the exit code.
 */
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides = {});

} // namespace pirm
