#include "trace_io.hpp"

#include "diagnostics.hpp"
#include "errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace pirm {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

bool has_newton_columns(const RunTrace& trace) {
  for (const auto& r : trace.rows) {
    if (r.omega) return true;
  }
  return trace.method.rfind("newton", 0) == 0;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json number_or_null(const std::optional<double>& v) {
  return v ? number_or_null(*v) : json(nullptr);
}

double parse_field(const std::string& s) {
  if (s.empty() || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

} // namespace

std::string trace_to_csv(const RunTrace& trace, const TraceMetadata& meta) {
  std::ostringstream out;
  out << "# problem_hash," << meta.problem_hash << "\n";
  out << "# config_hash," << meta.config_hash << "\n";
  out << "# method," << meta.method << "\n";
  out << "# delta," << meta.delta << "\n";
  out << "# h," << meta.h << "\n";
  out << "# seed," << meta.seed << "\n";
  if (meta.n_star) out << "# n_star," << *meta.n_star << "\n";
  if (trace.failure) {
    out << "# failure_step," << trace.failure->step << "\n";
    if (trace.failure->equation) out << "# failure_equation," << *trace.failure->equation << "\n";
  }

  const std::size_t n_eq = trace.rows.empty() ? 0 : trace.rows.front().residuals.size();
  const bool newton = has_newton_columns(trace);
  out << "n,alpha,gamma";
  for (std::size_t i = 1; i <= n_eq; ++i) out << ",residual_" << i;
  out << ",error";
  for (std::size_t i = 1; i <= n_eq; ++i) out << ",inner_iters_" << i;
  if (newton) out << ",omega,envelope_bound";
  out << "\n";

  for (const auto& r : trace.rows) {
    out << r.n << ',' << format_number(r.alpha) << ',' << format_number(r.gamma);
    for (double v : r.residuals) out << ',' << format_number(v);
    out << ',' << opt(r.error);
    for (std::size_t i = 0; i < n_eq; ++i) {
      out << ',';
      if (i < r.inner_iterations.size()) out << r.inner_iterations[i];
    }
    if (newton) out << ',' << opt(r.omega) << ',' << opt(r.envelope_bound);
    out << "\n";
  }
  return out.str();
}

json trace_to_json(const RunTrace& trace, const TraceMetadata& meta) {
  json j;
  j["problem_hash"] = meta.problem_hash;
  j["config_hash"] = meta.config_hash;
  j["method"] = meta.method;
  j["delta"] = meta.delta;
  j["h"] = meta.h;
  j["seed"] = meta.seed;
  j["n_star"] = meta.n_star ? json(*meta.n_star) : json(nullptr);
  json rows = json::array();
  for (const auto& r : trace.rows) {
    json row;
    row["n"] = r.n;
    row["x"] = std::vector<double>(r.x.data(), r.x.data() + r.x.size());
    row["alpha"] = number_or_null(r.alpha);
    row["gamma"] = number_or_null(r.gamma);
    row["residuals"] = r.residuals;
    row["error"] = number_or_null(r.error);
    row["inner_iterations"] = r.inner_iterations;
    row["inner_residuals"] = r.inner_residuals;
    if (!r.subs.empty()) {
      json subs = json::array();
      for (const auto& s : r.subs) subs.push_back(std::vector<double>(s.data(), s.data() + s.size()));
      row["subs"] = subs;
    }
    if (r.omega) row["omega"] = number_or_null(r.omega);
    if (r.envelope_bound) row["envelope_bound"] = number_or_null(r.envelope_bound);
    if (r.collapse_deviation) row["collapse_deviation"] = *r.collapse_deviation;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  if (trace.failure) {
    j["failure"] = {{"step", trace.failure->step},
                    {"equation", trace.failure->equation ? json(*trace.failure->equation)
                                                         : json(nullptr)},
                    {"message", trace.failure->message}};
  }
  return j;
}

std::vector<double> CsvTrace::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
  throw ContractViolation("trace " + path + " has no column '" + name + "'");
}

CsvTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open trace '" + path + "'");
  CsvTrace t;
  t.path = path;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const std::string body = line.substr(2);
      const auto comma = body.find(',');
      if (comma != std::string::npos) t.meta[body.substr(0, comma)] = body.substr(comma + 1);
      continue;
    }
    auto fields = split(line, ',');
    if (t.columns.empty()) {
      t.columns = std::move(fields);
      continue;
    }
    if (fields.size() != t.columns.size()) {
      throw ContractViolation(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(t.columns.size()) + " fields");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      try {
        row.push_back(parse_field(f));
      } catch (const std::exception&) {
        throw ContractViolation(path + ":" + std::to_string(line_no) + ": bad number '" + f + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw ContractViolation("trace '" + path + "' has no header");
  return t;
}

Comparison compare_runs(const std::vector<std::string>& paths) {
  if (paths.size() < 2) throw ContractViolation("compare needs at least two traces");
  Comparison cmp;
  for (const auto& p : paths) {
    const CsvTrace t = read_trace_csv(p);
    const auto hash = t.meta.find("problem_hash");
    if (hash == t.meta.end()) throw ContractViolation("trace '" + p + "' has no problem hash");
    if (cmp.rows.empty()) {
      cmp.problem_hash = hash->second;
    } else if (hash->second != cmp.problem_hash) {
      throw ContractViolation("problem hash mismatch: '" + p + "' has " + hash->second +
                              ", expected " + cmp.problem_hash);
    }
    std::vector<double> errors;
    for (double e : t.column("error")) {
      if (!std::isnan(e)) errors.push_back(e);
    }
    if (errors.empty()) throw ContractViolation("trace '" + p + "' has no reference errors");
    ComparisonRow row;
    row.path = p;
    row.method = t.meta.count("method") ? t.meta.at("method") : "";
    row.delta = t.meta.count("delta") ? t.meta.at("delta") : "";
    row.h = t.meta.count("h") ? t.meta.at("h") : "";
    row.iterations = static_cast<long>(t.rows.size()) - 1;
    row.final_error = errors.back();
    row.floor = stagnation_floor(errors);
    if (!cmp.rows.empty()) row.ratio = cmp.rows.back().final_error / row.final_error;
    cmp.rows.push_back(std::move(row));
  }
  return cmp;
}

json Comparison::to_json() const {
  json j;
  j["problem_hash"] = problem_hash;
  json rs = json::array();
  for (const auto& r : rows) {
    rs.push_back({{"path", r.path},
                  {"method", r.method},
                  {"delta", r.delta},
                  {"h", r.h},
                  {"iterations", r.iterations},
                  {"final_error", r.final_error},
                  {"floor", r.floor},
                  {"ratio", r.ratio ? json(*r.ratio) : json(nullptr)}});
  }
  j["runs"] = std::move(rs);
  return j;
}

std::string Comparison::table() const {
  std::ostringstream out;
  out << "problem " << problem_hash << "\n";
  out << "trace,method,delta,h,iterations,final_error,floor,ratio\n";
  for (const auto& r : rows) {
    out << r.path << ',' << r.method << ',' << r.delta << ',' << r.h << ',' << r.iterations << ','
        << format_number(r.final_error) << ',' << format_number(r.floor) << ','
        << (r.ratio ? format_number(*r.ratio) : std::string()) << "\n";
  }
  return out.str();
}

} // namespace pirm
