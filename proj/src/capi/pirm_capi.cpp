#include "pirm/pirm.h"

#include "config.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "newton.hpp"
#include "space.hpp"
#include "trace_io.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

struct pirm_experiment {
  pirm::ExperimentConfig config;
};

struct pirm_space {
  pirm::Space space;
};

namespace {

thread_local std::string g_last_error;

pirm_status fail(pirm_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Maps the core exception hierarchy to status codes.
template <class Fn>
pirm_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const pirm::ConfigError& e) {
    return fail(PIRM_CONFIG_ERROR, e.what());
  } catch (const pirm::NoAdmissibleIndex& e) {
    return fail(PIRM_NO_ADMISSIBLE_INDEX, e.what());
  } catch (const pirm::ContractViolation& e) {
    return fail(PIRM_INVALID_ARGUMENT, e.what());
  } catch (const pirm::StepError& e) {
    return fail(PIRM_SOLVER_FAILURE, e.what());
  } catch (const pirm::InnerSolveError& e) {
    return fail(PIRM_SOLVER_FAILURE, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(PIRM_IO_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PIRM_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(PIRM_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(PIRM_INTERNAL_ERROR, "unknown error");
  }
}

} // namespace

extern "C" {

const char* pirm_version(void) { return "0.1.0"; }

const char* pirm_last_error(void) { return g_last_error.c_str(); }

void pirm_string_free(char* s) { std::free(s); }

pirm_status pirm_experiment_load(const char* path, pirm_experiment** out) {
  if (!path || !out) return fail(PIRM_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new pirm_experiment{pirm::load_config(path)};
    return PIRM_OK;
  });
}

pirm_status pirm_experiment_parse(const char* json_text, pirm_experiment** out) {
  if (!json_text || !out) return fail(PIRM_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new pirm_experiment{pirm::parse_config(json_text)};
    return PIRM_OK;
  });
}

void pirm_experiment_free(pirm_experiment* exp) { delete exp; }

pirm_status pirm_experiment_validate(const pirm_experiment* exp, char** report_json) {
  if (!exp) return fail(PIRM_INVALID_ARGUMENT, "null experiment");
  return guarded([&] {
    const pirm::BuiltProblem built = [&] {
      try {
        return pirm::build_problem(exp->config);
      } catch (const pirm::ContractViolation& e) {
        throw pirm::ConfigError(std::string("problem construction: ") + e.what());
      }
    }();
    const pirm::ValidationSummary v = pirm::validate_experiment(exp->config, built);
    if (report_json) *report_json = dup_string(v.to_json().dump(2));
    if (v.violated) {
      g_last_error = "schedule validation reported a violated condition";
      return PIRM_STRICT_VIOLATION;
    }
    return PIRM_OK;
  });
}

pirm_status pirm_experiment_solve(pirm_experiment* exp, const char* out_dir, int strict,
                                  int threads, char** summary_json) {
  if (!exp) return fail(PIRM_INVALID_ARGUMENT, "null experiment");
  return guarded([&] {
    pirm::RunOverrides o;
    if (out_dir) o.out_dir = out_dir;
    if (strict >= 0) o.strict = strict != 0;
    if (threads > 0) o.threads = threads;
    const pirm::ExperimentOutcome r = pirm::run_experiment(exp->config, o);
    if (summary_json) *summary_json = dup_string(r.summary.dump(2));
    switch (r.exit_code) {
    case pirm::kExitOk:
      return PIRM_OK;
    case pirm::kExitStrictViolation:
      g_last_error = "schedule validation reported a violated condition";
      return PIRM_STRICT_VIOLATION;
    default:
      g_last_error = r.summary.value("message", std::string("solver failure"));
      if (r.summary.contains("failure")) {
        g_last_error = r.summary["failure"].value("message", g_last_error);
      }
      return PIRM_SOLVER_FAILURE;
    }
  });
}

pirm_status pirm_compare_traces(const char* const* paths, size_t count, char** report_json) {
  if (!paths && count > 0) return fail(PIRM_INVALID_ARGUMENT, "null path list");
  return guarded([&] {
    std::vector<std::string> p;
    for (size_t i = 0; i < count; ++i) {
      if (!paths[i]) return fail(PIRM_INVALID_ARGUMENT, "null path");
      p.emplace_back(paths[i]);
    }
    const pirm::Comparison c = pirm::compare_runs(p);
    if (report_json) *report_json = dup_string(c.to_json().dump(2));
    return PIRM_OK;
  });
}

pirm_status pirm_stopping_index(double delta, double h, double eta, double c0, double k,
                                long n_cap, long* index, int* clamped) {
  if (!index) return fail(PIRM_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    const auto alpha = pirm::Schedule::power_law(pirm::ScheduleRole::Alpha, c0, k);
    const pirm::StoppingIndex s = pirm::stopping_index(delta, h, eta, alpha, n_cap);
    *index = s.index;
    if (clamped) *clamped = s.clamped ? 1 : 0;
    return PIRM_OK;
  });
}

pirm_status pirm_space_create(int hilbert, double p, int dim, pirm_space** out) {
  if (!out) return fail(PIRM_INVALID_ARGUMENT, "null output");
  *out = nullptr;
  return guarded([&] {
    if (hilbert && p != 2.0) return fail(PIRM_INVALID_ARGUMENT, "a Hilbert space has p = 2");
    *out = new pirm_space{hilbert ? pirm::Space::hilbert(dim) : pirm::Space::lp(p, dim)};
    return PIRM_OK;
  });
}

void pirm_space_free(pirm_space* space) { delete space; }

pirm_status pirm_space_norm(const pirm_space* space, const double* x, size_t n, double* out) {
  if (!space || !x || !out) return fail(PIRM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const pirm::Vector v = Eigen::Map<const pirm::Vector>(x, static_cast<Eigen::Index>(n));
    space->space.require_dim(v);
    *out = space->space.norm(v);
    return PIRM_OK;
  });
}

pirm_status pirm_space_duality_map(const pirm_space* space, const double* x, size_t n,
                                   double* out) {
  if (!space || !x || !out) return fail(PIRM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const pirm::Vector v = Eigen::Map<const pirm::Vector>(x, static_cast<Eigen::Index>(n));
    space->space.require_dim(v);
    const pirm::Vector j = space->space.duality_map(v);
    std::memcpy(out, j.data(), n * sizeof(double));
    return PIRM_OK;
  });
}

} // extern "C"
