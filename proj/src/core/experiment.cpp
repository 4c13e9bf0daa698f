#include "experiment.hpp"

#include "errors.hpp"
#include "newton.hpp"
#include "random.hpp"
#include "trace_io.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace pirm {

using nlohmann::json;
namespace fs = std::filesystem;

json report_to_json(const ScheduleReport& r) {
  json j;
  j["condition"] = r.condition;
  j["verdict"] = to_string(r.verdict);
  j["horizon"] = r.horizon;
  j["first_violation"] = r.first_violation ? json(*r.first_violation) : json(nullptr);
  j["note"] = r.note;
  if (r.certified_rho) j["certified_rho"] = *r.certified_rho;
  json trace = json::array();
  for (const auto& [n, v] : r.trace) {
    trace.push_back({n, std::isfinite(v) ? json(v) : json(nullptr)});
  }
  j["trace"] = std::move(trace);
  return j;
}

json ValidationSummary::to_json() const {
  json j;
  j["violated"] = violated;
  if (!radius_note.empty()) j["radius_note"] = radius_note;
  json rs = json::array();
  for (const auto& r : reports) rs.push_back(report_to_json(r));
  j["reports"] = std::move(rs);
  return j;
}

ValidationSummary validate_experiment(const ExperimentConfig& cfg, const BuiltProblem& built) {
  ValidationSummary out;
  try {
    switch (cfg.method) {
    case MethodKind::Implicit: {
      double radius = 1.0;
      if (cfg.radius) {
        radius = *cfg.radius;
      } else if (built.oracle) {
        radius = std::max(2.0 * cfg.space.norm(built.oracle->xhat), 1e-6);
        out.radius_note = "R = 2 ||xhat|| from the oracle";
      } else {
        out.radius_note = "no oracle and no method.radius; R = 1 assumed";
      }
      out.reports = validate_implicit(cfg.space, cfg.alpha, cfg.gamma, radius);
      if (cfg.noise) {
        out.reports.push_back(validate_noisy_coupling(cfg.alpha, cfg.noise->h, cfg.noise->delta));
      }
      break;
    }
    case MethodKind::Explicit:
      out.reports = validate_explicit(cfg.space, cfg.alpha, cfg.gamma, cfg.explicit_d);
      break;
    case MethodKind::Newton:
      out.reports.push_back(validate_newton(cfg.alpha));
      break;
    }
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("schedules: ") + e.what());
  }
  for (const auto& r : out.reports) out.violated = out.violated || !r.ok();
  return out;
}

namespace {

std::string describe(const Schedule& s) {
  if (!s.is_power_law()) return "table";
  if (s.exponent() == 0.0) return format_number(s.coefficient());
  return format_number(s.coefficient()) + "*(n+1)^-" + format_number(s.exponent());
}

void write_file(const fs::path& path, const std::string& text, std::vector<std::string>& artifacts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
  artifacts.push_back(path.string());
}

Vector start_point(const ExperimentConfig& cfg, const BuiltProblem& built) {
  switch (cfg.start.kind) {
  case StartConfig::Kind::Zero:
    return Vector::Zero(cfg.space.dim());
  case StartConfig::Kind::Vector:
    return cfg.start.vector;
  case StartConfig::Kind::Offset: {
    if (!built.oracle) {
      throw ConfigError("run.x0.offset_norm needs a reference solution (" + built.oracle_note + ")");
    }
    Rng rng(derive_seed(*cfg.seed, 0x7830ULL));
    return built.oracle->xhat + random_vector_with_norm(rng, cfg.space, cfg.start.offset_norm);
  }
  }
  return Vector::Zero(cfg.space.dim());
}

json gate_to_json(const NewtonRun& run) {
  json g;
  g["a"] = run.gate.a;
  g["b"] = run.gate.b;
  g["c"] = run.gate.c;
  g["lhs"] = run.gate.lhs;
  g["passed"] = run.gate.passed;
  auto num = [](const std::optional<double>& v) {
    if (!v) return json(nullptr);
    return std::isfinite(*v) ? json(*v) : json("inf");
  };
  g["m_plus"] = num(run.gate.m_plus);
  g["m_minus"] = num(run.gate.m_minus);
  g["omega0"] = num(run.gate.omega0);
  g["omega0_status"] = run.gate.omega0_status;
  g["rate_claim"] = run.gate.rate_claim();
  g["rho"] = std::isfinite(run.rho) ? json(run.rho) : json(nullptr);
  g["lipschitz_estimate"] = run.lipschitz ? json(*run.lipschitz) : json(nullptr);
  return g;
}

} // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentOutcome outcome;
  const fs::path dir = overrides.out_dir ? *overrides.out_dir : cfg.out_dir;
  const bool strict = overrides.strict ? *overrides.strict : cfg.strict;
  RunOptions options;
  options.threads = overrides.threads ? *overrides.threads : cfg.threads;
  options.record_subiterates = cfg.record_subiterates;
  if (options.threads < 1) throw ConfigError("threads must be >= 1");

  BuiltProblem built = [&] {
    try {
      return build_problem(cfg);
    } catch (const ContractViolation& e) {
      throw ConfigError(std::string("problem construction: ") + e.what());
    }
  }();
  const ValidationSummary validation = validate_experiment(cfg, built);

  json& summary = outcome.summary;
  summary["method"] = to_string(cfg.method);
  summary["schedules"] = cfg.schedule_label;
  summary["config_hash"] = cfg.config_hash;
  summary["problem_hash"] = cfg.problem_hash;
  summary["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  summary["strict"] = strict;
  json verdicts = json::array();
  for (const auto& r : validation.reports) {
    verdicts.push_back({{"condition", r.condition}, {"verdict", to_string(r.verdict)}});
  }
  summary["gates"]["schedules"] = verdicts;
  if (built.oracle) {
    summary["oracle"] = {{"route", built.oracle->route},
                         {"cross_check", built.oracle->cross_check
                                             ? json(*built.oracle->cross_check)
                                             : json(nullptr)},
                         {"independent_check", built.oracle->independent_check}};
  } else {
    summary["oracle"] = {{"route", nullptr}, {"note", built.oracle_note}};
  }

  if (!overrides.dry) {
    fs::create_directories(dir);
    write_file(dir / "validation.json", validation.to_json().dump(2) + "\n", outcome.artifacts);
  }

  auto finish = [&](int code, const std::string& status) {
    summary["status"] = status;
    summary["exit_code"] = code;
    summary["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    outcome.exit_code = code;
    if (!overrides.dry) write_file(dir / "summary.json", summary.dump(2) + "\n", outcome.artifacts);
    summary["artifacts"] = outcome.artifacts;
    return outcome;
  };

  if (strict && validation.violated) {
    summary["message"] = "schedule validation reported a violated condition";
    return finish(kExitStrictViolation, "strict-violation");
  }

  const Vector x0 = start_point(cfg, built);
  const SystemProblem& problem = built.problem;
  TraceMetadata meta;
  meta.problem_hash = cfg.problem_hash;
  meta.config_hash = cfg.config_hash;
  meta.seed = cfg.seed ? std::to_string(*cfg.seed) : "";
  if (cfg.noise) {
    meta.delta = describe(cfg.noise->delta);
    meta.h = describe(cfg.noise->h);
  }

  RunTrace trace;
  try {
    switch (cfg.method) {
    case MethodKind::Implicit:
      if (cfg.noise) {
        NoiseLevels levels;
        levels.h = cfg.noise->h;
        levels.delta = cfg.noise->delta;
        levels.growth_constant = cfg.noise->growth_constant;
        levels.growth_slope = cfg.noise->growth_slope;
        levels.seed = cfg.noise->seed;
        levels.redraw_per_level = cfg.noise->redraw_per_level;
        trace = run_implicit_noisy(problem, levels, cfg.alpha, cfg.gamma, x0, cfg.n_iters,
                                   cfg.inner, options);
      } else {
        trace = run_implicit(problem, cfg.alpha, cfg.gamma, x0, cfg.n_iters, cfg.inner, options);
      }
      break;
    case MethodKind::Explicit:
      trace = run_explicit(problem, cfg.alpha, cfg.gamma, x0, cfg.n_iters, options);
      break;
    case MethodKind::Newton: {
      if (!built.oracle) {
        throw ConfigError("newton anchors need a reference solution (" + built.oracle_note + ")");
      }
      std::vector<Vector> v = cfg.anchors.v;
      if (v.empty()) {
        for (std::size_t i = 0; i < problem.size(); ++i) {
          Rng rng(derive_seed(*cfg.anchors.v_seed, i));
          v.push_back(random_vector_with_norm(rng, cfg.space, cfg.anchors.v_norm));
        }
      }
      if (v.size() != problem.size()) {
        throw ConfigError("method.anchors.vectors needs one vector per equation");
      }
      const SourceAnchors anchors = make_source_anchors(problem, built.oracle->xhat, v);
      NewtonConfig nc;
      nc.anchors = anchors.anchors;
      nc.sum_v_norm = anchors.sum_v_norm;
      nc.alpha = cfg.alpha;
      nc.eta = cfg.eta;
      nc.inner = cfg.inner;
      nc.lipschitz = cfg.lipschitz;
      NewtonRun run;
      if (cfg.noise) {
        NoiseSpec noise;
        noise.h = cfg.noise->h.value(0);
        noise.delta = cfg.noise->delta.value(0);
        noise.growth_constant = cfg.noise->growth_constant;
        noise.growth_slope = cfg.noise->growth_slope;
        noise.seed = cfg.noise->seed;
        run = run_newton_noisy(problem, noise, nc, x0, cfg.n_cap, options);
        meta.n_star = run.trace.n_star;
        summary["n_star"] = *run.trace.n_star;
      } else {
        run = run_newton(problem, nc, x0, cfg.n_iters, options);
      }
      summary["gates"]["newton"] = gate_to_json(run);
      summary["sum_v_norm"] = anchors.sum_v_norm;
      trace = std::move(run.trace);
      break;
    }
    }
  } catch (const NoAdmissibleIndex& e) {
    summary["message"] = e.what();
    return finish(kExitSolverFailure, "solver-failure");
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  meta.method = trace.method;

  if (!overrides.dry) {
    if (cfg.write_csv) write_file(dir / "trace.csv", trace_to_csv(trace, meta), outcome.artifacts);
    if (cfg.write_json && cfg.space.dim() <= 50) {
      write_file(dir / "trace.json", trace_to_json(trace, meta).dump() + "\n", outcome.artifacts);
    }
  }

  summary["iterations"] = trace.rows.empty() ? 0 : trace.rows.back().n;
  if (!trace.rows.empty() && trace.rows.back().error) {
    const std::vector<double> errors = trace.errors();
    summary["final_error"] = errors.back();
    summary["floor"] = stagnation_floor(errors);
    try {
      const RateFit fit = fit_rate(errors, trace.alphas());
      summary["fitted_slope"] = fit.slope;
      summary["fit_residual"] = fit.residual;
      summary["rate_constant"] = std::exp(fit.intercept);
    } catch (const ContractViolation&) {
      summary["fitted_slope"] = nullptr;
    }
  } else {
    summary["final_error"] = nullptr;
    summary["floor"] = nullptr;
    summary["fitted_slope"] = nullptr;
  }
  if (!trace.rows.empty()) {
    const auto& last = trace.rows.back();
    summary["final_max_residual"] =
        last.residuals.empty() ? 0.0 : *std::max_element(last.residuals.begin(), last.residuals.end());
  }
  if (trace.failure) {
    summary["failure"] = {{"step", trace.failure->step},
                          {"equation", trace.failure->equation ? json(*trace.failure->equation)
                                                               : json(nullptr)},
                          {"message", trace.failure->message}};
    return finish(kExitSolverFailure, "solver-failure");
  }
  return finish(kExitOk, "ok");
}

} // namespace pirm
