#pragma once

#include "pirm.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pirm {

struct TraceMetadata {
  std::string problem_hash;
  std::string config_hash;
  std::string method;
  std::string delta = "0";
  std::string h = "0";
  std::string seed;
  std::optional<long> n_star;
};

/// Formats a double with 17 significant digits; "nan"/"inf" for non-finite.
std::string format_number(double v);

/**
 * CSV trace: '#'-prefixed metadata lines, a header row
 * n,alpha,gamma,residual_1..N,error,inner_iters_1..N[,omega,envelope_bound]
 * and one row per iterate. Missing values are empty fields.
 */
std::string trace_to_csv(const RunTrace& trace, const TraceMetadata& meta);

/// JSON trace with the full iterate vectors.
nlohmann::json trace_to_json(const RunTrace& trace, const TraceMetadata& meta);

struct CsvTrace {
  std::string path;
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Values of a named column (NaN for empty fields).
  std::vector<double> column(const std::string& name) const;
};

CsvTrace read_trace_csv(const std::string& path);

struct ComparisonRow {
  std::string path;
  std::string method;
  std::string delta;
  std::string h;
  long iterations = 0;
  double final_error = 0.0;
  double floor = 0.0;
  /// final_error of the previous row divided by this row's final_error.
  std::optional<double> ratio;
};

struct Comparison {
  std::string problem_hash;
  std::vector<ComparisonRow> rows;

  nlohmann::json to_json() const;
  std::string table() const;
};

/// Needs at least two traces with the same problem hash and an error column.
Comparison compare_runs(const std::vector<std::string>& paths);

} // namespace pirm
