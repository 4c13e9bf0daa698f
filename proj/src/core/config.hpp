#pragma once

#include "diagnostics.hpp"
#include "inner.hpp"
#include "newton.hpp"
#include "pirm.hpp"
#include "schedules.hpp"
#include "space.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pirm {

enum class MethodKind { Implicit, Explicit, Newton };

std::string to_string(MethodKind m);

struct NoiseConfig {
  Schedule h = Schedule::constant(ScheduleRole::Noise, 0.0);
  Schedule delta = Schedule::constant(ScheduleRole::Noise, 0.0);
  double growth_constant = 1.0;
  double growth_slope = 1.0;
  std::uint64_t seed = 0;
  bool redraw_per_level = false;
};

struct AnchorConfig {
  std::optional<std::uint64_t> v_seed;
  double v_norm = 0.0;
  std::vector<Vector> v;  // explicit source elements
};

struct StartConfig {
  enum class Kind { Zero, Vector, Offset };
  Kind kind = Kind::Zero;
  Vector vector;
  double offset_norm = 0.0;
};

/**
 * Parsed and validated experiment description. `document` keeps the JSON as
 * loaded; the hashes are FNV-1a over its canonical (sorted-key) dump.
 */
struct ExperimentConfig {
  nlohmann::json document;
  std::string source;

  Space space = Space::hilbert(1);
  MethodKind method = MethodKind::Implicit;
  InnerConfig inner;
  double eta = 1.0;
  double explicit_d = 0.5;
  std::optional<double> radius;
  std::optional<double> lipschitz;
  AnchorConfig anchors;

  Schedule alpha = Schedule::power_law(ScheduleRole::Alpha, 1.0, 0.25);
  Schedule gamma = Schedule::power_law(ScheduleRole::Gamma, 1.0, 0.5);
  std::string schedule_label;
  std::optional<NoiseConfig> noise;

  long n_iters = 0;
  long n_cap = kDefaultNCap;
  std::optional<std::uint64_t> seed;
  StartConfig start;
  int threads = 1;
  bool record_subiterates = false;

  std::string out_dir = "pirm-out";
  bool write_csv = true;
  bool write_json = true;
  bool strict = false;

  std::string config_hash;
  std::string problem_hash;
};

/// Reads and validates a JSON config. Errors are ConfigError with the
/// offending field path or the line/column of a parse error.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");

/// Builds the system described by the config; sets the known solution from
/// the oracle when one is available.
struct BuiltProblem {
  SystemProblem problem;
  std::optional<OracleResult> oracle;
  std::string oracle_note;
};

BuiltProblem build_problem(const ExperimentConfig& cfg);

std::string fnv1a_hex(const std::string& bytes);

} // namespace pirm
