#include "config.hpp"

#include "errors.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pirm {

using nlohmann::json;

std::string to_string(MethodKind m) {
  switch (m) {
  case MethodKind::Implicit:
    return "implicit";
  case MethodKind::Explicit:
    return "explicit";
  case MethodKind::Newton:
    return "newton";
  }
  return "implicit";
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Read-only view of a JSON value that knows its path for error messages.
class Field {
public:
  Field(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("field '" + path_ + "': " + msg);
  }

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }
  bool is_number() const { return j_->is_number(); }
  bool is_object() const { return j_->is_object(); }
  bool is_string() const { return j_->is_string(); }

  bool has(const char* key) const { return j_->is_object() && j_->contains(key); }

  Field operator[](const char* key) const {
    require_object();
    auto it = j_->find(key);
    if (it == j_->end()) {
      throw ConfigError("missing required field '" + child(key) + "'");
    }
    return Field(*it, child(key));
  }

  std::optional<Field> get(const char* key) const {
    require_object();
    auto it = j_->find(key);
    if (it == j_->end() || it->is_null()) return std::nullopt;
    return Field(*it, child(key));
  }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  Field item(std::size_t i) const {
    return Field((*j_)[i], path_ + "[" + std::to_string(i) + "]");
  }

  void only(std::initializer_list<const char*> keys) const {
    require_object();
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      const bool known = std::any_of(keys.begin(), keys.end(),
                                     [&](const char* k) { return it.key() == k; });
      if (!known) throw ConfigError("unknown field '" + child(it.key().c_str()) + "'");
    }
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  long integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<long>();
  }

  std::uint64_t seed() const {
    if (!j_->is_number_integer() || j_->get<long long>() < 0) fail("expected a seed >= 0");
    return j_->get<std::uint64_t>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }

  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  Vector vector(int dim = -1) const {
    const std::size_t n = size();
    if (dim >= 0 && n != static_cast<std::size_t>(dim)) {
      fail("expected " + std::to_string(dim) + " entries, got " + std::to_string(n));
    }
    Vector v(static_cast<int>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<int>(i)] = item(i).number();
    return v;
  }

  Matrix matrix(int rows, int cols) const {
    if (size() != static_cast<std::size_t>(rows)) {
      fail("expected " + std::to_string(rows) + " rows");
    }
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) m.row(r) = item(static_cast<std::size_t>(r)).vector(cols);
    return m;
  }

private:
  void require_object() const {
    if (!j_->is_object()) fail("expected an object");
  }
  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* j_;
  std::string path_;
};

// ContractViolation raised while building an object is reported at `f`.
template <class Fn>
auto at_field(const Field& f, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ContractViolation& e) {
    f.fail(e.what());
  } catch (const CapabilityError& e) {
    f.fail(e.what());
  }
}

Schedule parse_schedule(const Field& f, ScheduleRole role) {
  return at_field(f, [&] {
    if (f.is_number()) return Schedule::constant(role, f.number());
    f.only({"c0", "k", "table"});
    if (auto t = f.get("table")) {
      const Vector v = t->vector();
      return Schedule::table(role, std::vector<double>(v.data(), v.data() + v.size()));
    }
    const double c0 = f.get("c0") ? f["c0"].number() : 1.0;
    return Schedule::power_law(role, c0, f["k"].number());
  });
}

ScalarFunction parse_scalar(const Field& f) {
  f.only({"linear", "cubic", "saturation", "offset"});
  ScalarFunction g;
  if (auto v = f.get("linear")) g.linear = v->number();
  if (auto v = f.get("cubic")) g.cubic = v->number();
  if (auto v = f.get("saturation")) g.saturation = v->number();
  if (auto v = f.get("offset")) g.offset = v->number();
  return g;
}

Vector vector_or_scalar(const Field& f, int d) {
  if (f.is_number()) return Vector::Constant(d, f.number());
  return f.vector(d);
}

NonexpansiveMap parse_map(const Field& f, int d) {
  const std::string kind = f["kind"].string();
  return at_field(f, [&]() -> NonexpansiveMap {
    if (kind == "linear") {
      f.only({"kind", "matrix"});
      return NonexpansiveMap::linear(f["matrix"].matrix(d, d));
    }
    if (kind == "doubly_stochastic") {
      f.only({"kind", "seed", "terms"});
      Rng rng(derive_seed(f["seed"].seed(), 0x6473ULL));
      const int terms = f.get("terms") ? static_cast<int>(f["terms"].integer()) : 4;
      if (terms < 1) f.fail("terms must be >= 1");
      Matrix m = Matrix::Zero(d, d);
      const Vector w = uniform_vector(rng, terms, 0.1, 1.0);
      for (int k = 0; k < terms; ++k) {
        std::vector<int> perm(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) perm[static_cast<std::size_t>(i)] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int i = 0; i < d; ++i) m(i, perm[static_cast<std::size_t>(i)]) += w[k] / w.sum();
      }
      return NonexpansiveMap::linear(m);
    }
    if (kind == "box") {
      f.only({"kind", "lower", "upper"});
      return NonexpansiveMap::box(vector_or_scalar(f["lower"], d), vector_or_scalar(f["upper"], d));
    }
    if (kind == "ball") {
      f.only({"kind", "center", "radius"});
      const Vector c = f.get("center") ? vector_or_scalar(f["center"], d) : Vector::Zero(d);
      return NonexpansiveMap::ball(c, f["radius"].number());
    }
    if (kind == "compose") {
      f.only({"kind", "maps"});
      const Field maps = f["maps"];
      std::vector<NonexpansiveMap> parts;
      for (std::size_t i = 0; i < maps.size(); ++i) parts.push_back(parse_map(maps.item(i), d));
      return NonexpansiveMap::compose(std::move(parts));
    }
    f["kind"].fail("unknown map kind '" + kind +
                   "' (linear, doubly_stochastic, box, ball, compose)");
  });
}

Operator parse_base_operator(const Field& f, const Space& space, std::size_t index) {
  const int d = space.dim();
  const std::string type = f["type"].string();
  return at_field(f, [&]() -> Operator {
    if (type == "psd_linear") {
      f.only({"type", "matrix", "data"});
      return Operator::psd_linear(f["matrix"].matrix(d, d));
    }
    if (type == "psd_shared_basis") {
      f.only({"type", "basis_seed", "columns", "eigen_range", "eigen_seed", "data"});
      Rng brng(derive_seed(f["basis_seed"].seed(), 1));
      const Matrix q = random_orthogonal(brng, d);
      const Field cols = f["columns"];
      const Vector range = f["eigen_range"].vector(2);
      if (!(range[0] >= 0.0 && range[1] >= range[0])) {
        f["eigen_range"].fail("expected 0 <= lo <= hi");
      }
      Rng erng(derive_seed(f["eigen_seed"].seed(), index));
      const Vector lambda = uniform_vector(erng, static_cast<int>(cols.size()), range[0], range[1]);
      Matrix m = Matrix::Zero(d, d);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        const long c = cols.item(k).integer();
        if (c < 0 || c >= d) cols.item(k).fail("column index out of range");
        m += lambda[static_cast<int>(k)] * q.col(c) * q.col(c).transpose();
      }
      return Operator::psd_linear(0.5 * (m + m.transpose()));
    }
    if (type == "residual_nonexpansive") {
      f.only({"type", "map", "data"});
      return Operator::residual_of_nonexpansive(parse_map(f["map"], d), space,
                                                derive_seed(0x7265ULL, index));
    }
    if (type == "diagonal_monotone") {
      f.only({"type", "function", "functions", "data"});
      std::vector<ScalarFunction> g;
      if (auto fs = f.get("functions")) {
        if (fs->size() != static_cast<std::size_t>(d)) fs->fail("expected one function per coordinate");
        for (std::size_t i = 0; i < fs->size(); ++i) g.push_back(parse_scalar(fs->item(i)));
      } else {
        g.assign(static_cast<std::size_t>(d), parse_scalar(f["function"]));
      }
      return Operator::diagonal_monotone(std::move(g));
    }
    f["type"].fail("unknown equation type '" + type +
                   "' (psd_linear, psd_shared_basis, residual_nonexpansive, diagonal_monotone)");
  });
}

Space parse_space(const Field& f) {
  f.only({"kind", "p", "dim"});
  const std::string kind = f["kind"].string();
  const long dim = f["dim"].integer();
  if (dim < 1 || dim > 100000) f["dim"].fail("expected 1 <= dim <= 100000");
  return at_field(f, [&] {
    if (kind == "hilbert") {
      if (f.has("p") && f["p"].number() != 2.0) f["p"].fail("a Hilbert space has p = 2");
      return Space::hilbert(static_cast<int>(dim));
    }
    if (kind == "lp") return Space::lp(f["p"].number(), static_cast<int>(dim));
    f["kind"].fail("expected 'hilbert' or 'lp'");
  });
}

InnerConfig parse_inner(const Field& f) {
  f.only({"tol", "max_iter", "method"});
  InnerConfig c;
  if (auto v = f.get("tol")) {
    c.tol = v->number();
    if (!(c.tol > 0.0)) v->fail("expected tol > 0");
  }
  if (auto v = f.get("max_iter")) {
    c.max_iter = static_cast<int>(v->integer());
    if (c.max_iter < 1) v->fail("expected max_iter >= 1");
  }
  if (auto v = f.get("method")) {
    const std::string m = v->string();
    if (m == "direct") {
      c.method = InnerMethod::DirectLinear;
    } else if (m == "contraction") {
      c.method = InnerMethod::ContractionFixedPoint;
    } else if (m == "newton") {
      c.method = InnerMethod::DampedNewton;
    } else if (m != "auto") {
      v->fail("expected auto, direct, contraction or newton");
    }
  }
  return c;
}

void parse_schedules(const Field& f, ExperimentConfig& cfg) {
  f.only({"preset", "k", "alpha", "gamma"});
  if (auto p = f.get("preset")) {
    if (f.has("alpha") || f.has("gamma")) f.fail("give either a preset or alpha/gamma");
    std::optional<double> k;
    if (auto kf = f.get("k")) k = kf->number();
    const std::string name = p->string();
    SchedulePair pair = at_field(*p, [&] { return preset(name, cfg.space, k); });
    cfg.alpha = pair.alpha;
    cfg.gamma = pair.gamma;
    cfg.schedule_label = name;
    return;
  }
  cfg.alpha = parse_schedule(f["alpha"], ScheduleRole::Alpha);
  if (cfg.method != MethodKind::Newton) {
    cfg.gamma = parse_schedule(f["gamma"], ScheduleRole::Gamma);
  } else if (auto g = f.get("gamma")) {
    cfg.gamma = parse_schedule(*g, ScheduleRole::Gamma);
  }
  cfg.schedule_label = "custom";
}

void parse_method(const Field& f, ExperimentConfig& cfg) {
  f.only({"name", "inner", "eta", "anchors", "d", "radius", "lipschitz"});
  const std::string name = f["name"].string();
  if (name == "implicit") {
    cfg.method = MethodKind::Implicit;
  } else if (name == "explicit") {
    cfg.method = MethodKind::Explicit;
  } else if (name == "newton") {
    cfg.method = MethodKind::Newton;
  } else {
    f["name"].fail("expected implicit, explicit or newton");
  }
  if (auto v = f.get("inner")) cfg.inner = parse_inner(*v);
  if (auto v = f.get("eta")) {
    cfg.eta = v->number();
    if (!(cfg.eta > 0.0)) v->fail("expected eta > 0");
  }
  if (auto v = f.get("d")) {
    cfg.explicit_d = v->number();
    if (!(cfg.explicit_d > 0.0 && cfg.explicit_d < 1.0)) v->fail("expected 0 < d < 1");
  }
  if (auto v = f.get("radius")) {
    cfg.radius = v->number();
    if (!(*cfg.radius > 0.0)) v->fail("expected radius > 0");
  }
  if (auto v = f.get("lipschitz")) {
    cfg.lipschitz = v->number();
    if (!(*cfg.lipschitz >= 0.0)) v->fail("expected lipschitz >= 0");
  }
  if (auto a = f.get("anchors")) {
    a->only({"v_seed", "v_norm", "vectors"});
    if (auto vs = a->get("vectors")) {
      for (std::size_t i = 0; i < vs->size(); ++i) {
        cfg.anchors.v.push_back(vs->item(i).vector(cfg.space.dim()));
      }
    } else {
      cfg.anchors.v_seed = (*a)["v_seed"].seed();
      cfg.anchors.v_norm = (*a)["v_norm"].number();
      if (!(cfg.anchors.v_norm >= 0.0)) (*a)["v_norm"].fail("expected v_norm >= 0");
    }
  } else if (cfg.method == MethodKind::Newton) {
    f.fail("newton needs 'anchors' (v_seed and v_norm, or vectors)");
  }
}

void parse_noise(const Field& f, ExperimentConfig& cfg) {
  f.only({"h", "delta", "growth", "seed", "redraw_per_level"});
  NoiseConfig n;
  if (!f.has("seed")) throw ConfigError("missing required field 'noise.seed' (noise needs a seed)");
  n.seed = f["seed"].seed();
  if (auto v = f.get("h")) n.h = parse_schedule(*v, ScheduleRole::Noise);
  if (auto v = f.get("delta")) n.delta = parse_schedule(*v, ScheduleRole::Noise);
  if (auto v = f.get("growth")) {
    const Vector g = v->vector(2);
    if (!(g[0] >= 0.0 && g[1] >= 0.0)) v->fail("growth coefficients must be >= 0");
    n.growth_constant = g[0];
    n.growth_slope = g[1];
  }
  if (auto v = f.get("redraw_per_level")) n.redraw_per_level = v->boolean();
  if (cfg.method == MethodKind::Newton) {
    for (const auto& [key, s] : {std::pair{"h", &n.h}, std::pair{"delta", &n.delta}}) {
      if (!s->is_power_law() || s->exponent() != 0.0) {
        f[key].fail("newton runs take a single noise level (a number)");
      }
    }
  }
  if (cfg.method == MethodKind::Explicit) f.fail("noise is supported for implicit and newton runs");
  cfg.noise = n;
}

void parse_run(const Field& f, ExperimentConfig& cfg) {
  f.only({"n_iters", "n_cap", "seed", "x0", "threads", "record_subiterates"});
  if (auto v = f.get("seed")) cfg.seed = v->seed();
  if (auto v = f.get("n_cap")) {
    cfg.n_cap = v->integer();
    if (cfg.n_cap < 0) v->fail("expected n_cap >= 0");
  }
  const bool noisy_newton = cfg.method == MethodKind::Newton && cfg.noise;
  if (auto v = f.get("n_iters")) {
    cfg.n_iters = v->integer();
    if (cfg.n_iters < (cfg.method == MethodKind::Implicit ? 1 : 0)) v->fail("n_iters too small");
  } else if (!noisy_newton) {
    f["n_iters"];  // raises the missing-field error
  }
  if (auto v = f.get("threads")) {
    cfg.threads = static_cast<int>(v->integer());
    if (cfg.threads < 1 || cfg.threads > 256) v->fail("expected 1 <= threads <= 256");
  }
  if (auto v = f.get("record_subiterates")) cfg.record_subiterates = v->boolean();
  if (auto x = f.get("x0")) {
    if (x->is_string()) {
      if (x->string() != "zero") x->fail("expected \"zero\", {\"vector\": ...} or {\"offset_norm\": ...}");
    } else {
      x->only({"vector", "offset_norm"});
      if (auto v = x->get("vector")) {
        cfg.start.kind = StartConfig::Kind::Vector;
        cfg.start.vector = v->vector(cfg.space.dim());
      } else {
        cfg.start.kind = StartConfig::Kind::Offset;
        cfg.start.offset_norm = (*x)["offset_norm"].number();
        if (!(cfg.start.offset_norm >= 0.0)) (*x)["offset_norm"].fail("expected >= 0");
        if (!cfg.seed) throw ConfigError("missing required field 'run.seed' (random x0 needs a seed)");
      }
    }
  }
}

void parse_output(const Field& f, ExperimentConfig& cfg) {
  f.only({"dir", "formats"});
  if (auto v = f.get("dir")) cfg.out_dir = v->string();
  if (auto v = f.get("formats")) {
    cfg.write_csv = cfg.write_json = false;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string fmt = v->item(i).string();
      if (fmt == "csv") {
        cfg.write_csv = true;
      } else if (fmt == "json") {
        cfg.write_json = true;
      } else {
        v->item(i).fail("expected csv or json");
      }
    }
  }
}

std::vector<Operator> build_base_operators(const ExperimentConfig& cfg) {
  const Field root(cfg.document, "");
  const Field eqs = root["equations"];
  if (eqs.size() == 0) eqs.fail("at least one equation is required");
  std::vector<Operator> out;
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    out.push_back(parse_base_operator(eqs.item(i), cfg.space, i));
  }
  return out;
}

std::size_t line_of(const std::string& text, std::size_t byte, std::size_t* column) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  *column = col;
  return line;
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  cfg.source = source;
  try {
    cfg.document = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t col = 0;
    const std::size_t line = line_of(text, e.byte == 0 ? 0 : e.byte - 1, &col);
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": JSON parse error: " + e.what());
  }
  const Field root(cfg.document, "");
  if (!cfg.document.is_object()) throw ConfigError("config must be a JSON object");
  root.only({"space", "equations", "consistent_point", "oracle", "method", "schedules", "noise",
             "run", "output", "strict", "description"});

  cfg.space = parse_space(root["space"]);
  parse_method(root["method"], cfg);
  parse_schedules(root["schedules"], cfg);
  if (auto n = root.get("noise")) parse_noise(*n, cfg);
  parse_run(root["run"], cfg);
  if (auto o = root.get("output")) parse_output(*o, cfg);
  if (auto s = root.get("strict")) cfg.strict = s->boolean();

  if (auto cp = root.get("consistent_point")) {
    cp->only({"seed", "norm", "vector"});
    if (auto v = cp->get("vector")) {
      v->vector(cfg.space.dim());
    } else {
      if (!cp->has("seed")) {
        throw ConfigError("missing required field 'consistent_point.seed' (random point needs a seed)");
      }
      (*cp)["seed"].seed();
      (*cp)["norm"].number();
    }
  }
  if (auto o = root.get("oracle")) {
    o->only({"declared_set"});
    const Field ds = (*o)["declared_set"];
    ds.only({"point", "basis"});
    if (!ds["point"].is_string()) ds["point"].vector(cfg.space.dim());
    if (auto b = ds.get("basis")) {
      for (std::size_t i = 0; i < b->size(); ++i) b->item(i).vector(cfg.space.dim());
    }
  }
  build_base_operators(cfg);

  cfg.config_hash = fnv1a_hex(cfg.document.dump());
  json problem_part = json::object();
  for (const char* key : {"space", "equations", "consistent_point", "oracle"}) {
    if (cfg.document.contains(key)) problem_part[key] = cfg.document[key];
  }
  cfg.problem_hash = fnv1a_hex(problem_part.dump());
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

BuiltProblem build_problem(const ExperimentConfig& cfg) {
  const Field root(cfg.document, "");
  const Field eqs = root["equations"];
  std::vector<Operator> base = build_base_operators(cfg);
  const int d = cfg.space.dim();

  std::optional<Vector> point;
  if (auto cp = root.get("consistent_point")) {
    if (auto v = cp->get("vector")) {
      point = v->vector(d);
    } else {
      Rng rng(derive_seed((*cp)["seed"].seed(), 0x6370ULL));
      point = random_vector_with_norm(rng, cfg.space, (*cp)["norm"].number());
    }
  }

  std::vector<Operator> ops;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Field eq = eqs.item(i);
    if (auto data = eq.get("data")) {
      const Vector f = data->vector(d);
      ops.push_back(at_field(eq, [&] { return Operator::affine_residual(base[i], f); }));
    } else if (point) {
      const Vector f = base[i].apply(*point);
      ops.push_back(Operator::affine_residual(base[i], f));
    } else {
      ops.push_back(base[i]);
    }
  }

  OracleDescriptor desc;
  if (auto o = root.get("oracle")) {
    const Field ds = (*o)["declared_set"];
    desc.kind = OracleDescriptor::Kind::DeclaredAffineSet;
    if (ds["point"].is_string()) {
      if (ds["point"].string() != "consistent_point" || !point) {
        ds["point"].fail("expected a vector or \"consistent_point\"");
      }
      desc.point = *point;
    } else {
      desc.point = ds["point"].vector(d);
    }
    if (auto b = ds.get("basis")) {
      desc.basis = Matrix(d, static_cast<int>(b->size()));
      for (std::size_t k = 0; k < b->size(); ++k) desc.basis.col(static_cast<int>(k)) = b->item(k).vector(d);
    }
  } else {
    desc.kind = OracleDescriptor::Kind::Pseudoinverse;
  }

  BuiltProblem out{SystemProblem(cfg.space, ops, std::nullopt, desc), std::nullopt, ""};
  try {
    OracleResult r = min_norm_oracle(out.problem);
    out.problem = out.problem.with_known_solution(r.xhat);
    out.oracle = std::move(r);
  } catch (const NoOracle& e) {
    out.oracle_note = e.what();
  } catch (const ContractViolation& e) {
    out.oracle_note = std::string("oracle result rejected: ") + e.what();
  }
  return out;
}

} // namespace pirm
