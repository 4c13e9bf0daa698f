#include "operators.hpp"

#include "errors.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

namespace pirm {

// ---------------------------------------------------------------------------
// ScalarFunction

double ScalarFunction::value(double t) const {
  return linear * t + cubic * t * t * t + saturation * std::tanh(t) + offset;
}

double ScalarFunction::derivative(double t) const {
  const double th = std::tanh(t);
  return linear + 3.0 * cubic * t * t + saturation * (1.0 - th * th);
}

double ScalarFunction::second_derivative(double t) const {
  const double th = std::tanh(t);
  return 6.0 * cubic * t - 2.0 * saturation * th * (1.0 - th * th);
}

// ---------------------------------------------------------------------------
// NonexpansiveMap

namespace {

struct LinearMap {
  Matrix t;
};
struct BoxProjection {
  Vector lower, upper;
};
struct BallProjection {
  Vector center;
  double radius;
};
struct Composition {
  std::vector<NonexpansiveMap> maps;
};

constexpr double kNormSlack = 1e-12;

double riesz_thorin_bound(const Matrix& t, double p) {
  const double col = t.cwiseAbs().colwise().sum().maxCoeff();
  const double row = t.cwiseAbs().rowwise().sum().maxCoeff();
  return std::pow(col, 1.0 / p) * std::pow(row, 1.0 - 1.0 / p);
}

} // namespace

struct NonexpansiveMap::Impl {
  std::variant<LinearMap, BoxProjection, BallProjection, Composition> v;
  int dim;
};

NonexpansiveMap NonexpansiveMap::linear(Matrix t) {
  if (t.rows() != t.cols() || t.rows() < 1) {
    throw ContractViolation("linear nonexpansive map must be square");
  }
  if (!t.allFinite()) throw ContractViolation("matrix has non-finite entries");
  const int d = static_cast<int>(t.rows());
  return NonexpansiveMap(std::make_shared<const Impl>(Impl{LinearMap{std::move(t)}, d}));
}

NonexpansiveMap NonexpansiveMap::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() < 1) {
    throw ContractViolation("box bounds must have equal positive dimension");
  }
  if ((lower.array() > upper.array()).any()) {
    throw ContractViolation("box lower bound exceeds upper bound");
  }
  const int d = static_cast<int>(lower.size());
  return NonexpansiveMap(
      std::make_shared<const Impl>(Impl{BoxProjection{std::move(lower), std::move(upper)}, d}));
}

NonexpansiveMap NonexpansiveMap::ball(Vector center, double radius) {
  if (!(radius >= 0.0)) throw ContractViolation("ball radius must be >= 0");
  if (center.size() < 1) throw ContractViolation("ball center must be non-empty");
  const int d = static_cast<int>(center.size());
  return NonexpansiveMap(
      std::make_shared<const Impl>(Impl{BallProjection{std::move(center), radius}, d}));
}

NonexpansiveMap NonexpansiveMap::compose(std::vector<NonexpansiveMap> maps) {
  if (maps.empty()) throw ContractViolation("composition needs at least one map");
  const int d = maps.front().dim();
  for (const auto& m : maps) {
    if (m.dim() != d) throw ContractViolation("composition of maps with different dimensions");
  }
  return NonexpansiveMap(std::make_shared<const Impl>(Impl{Composition{std::move(maps)}, d}));
}

NonexpansiveMap::Kind NonexpansiveMap::kind() const {
  return static_cast<Kind>(impl_->v.index());
}

int NonexpansiveMap::dim() const { return impl_->dim; }

Vector NonexpansiveMap::apply(const Vector& x) const {
  if (x.size() != dim()) throw ContractViolation("dimension mismatch in nonexpansive map");
  return std::visit(
      [&](const auto& m) -> Vector {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LinearMap>) {
          return m.t * x;
        } else if constexpr (std::is_same_v<M, BoxProjection>) {
          return x.cwiseMax(m.lower).cwiseMin(m.upper);
        } else if constexpr (std::is_same_v<M, BallProjection>) {
          const Vector diff = x - m.center;
          const double r = diff.norm();
          if (r <= m.radius) return x;
          return m.center + diff * (m.radius / r);
        } else {
          Vector y = x;
          for (const auto& c : m.maps) y = c.apply(y);
          return y;
        }
      },
      impl_->v);
}

Vector NonexpansiveMap::derivative_apply(const Vector& x, const Vector& v) const {
  if (x.size() != dim() || v.size() != dim()) {
    throw ContractViolation("dimension mismatch in nonexpansive map derivative");
  }
  return std::visit(
      [&](const auto& m) -> Vector {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LinearMap>) {
          return m.t * v;
        } else if constexpr (std::is_same_v<M, BoxProjection>) {
          Vector out(v.size());
          for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (m.lower[i] == m.upper[i]) {
              out[i] = 0.0;
            } else if (x[i] > m.lower[i] && x[i] < m.upper[i]) {
              out[i] = v[i];
            } else if (x[i] < m.lower[i] || x[i] > m.upper[i]) {
              out[i] = 0.0;
            } else {
              throw CapabilityError("box projection is not differentiable on the box boundary");
            }
          }
          return out;
        } else if constexpr (std::is_same_v<M, BallProjection>) {
          const Vector diff = x - m.center;
          const double r = diff.norm();
          if (r < m.radius) return v;
          if (r == m.radius) {
            throw CapabilityError("ball projection is not differentiable on the sphere");
          }
          const Vector u = diff / r;
          return (m.radius / r) * (v - u * u.dot(v));
        } else {
          Vector y = x;
          Vector w = v;
          for (const auto& c : m.maps) {
            w = c.derivative_apply(y, w);
            y = c.apply(y);
          }
          return w;
        }
      },
      impl_->v);
}

std::optional<Matrix> NonexpansiveMap::matrix() const {
  if (const auto* lin = std::get_if<LinearMap>(&impl_->v)) return lin->t;
  if (const auto* comp = std::get_if<Composition>(&impl_->v)) {
    Matrix acc = Matrix::Identity(dim(), dim());
    for (const auto& c : comp->maps) {
      auto m = c.matrix();
      if (!m) return std::nullopt;
      acc = (*m) * acc;
    }
    return acc;
  }
  return std::nullopt;
}

std::optional<std::string> NonexpansiveMap::certify(const Space& space) const {
  return std::visit(
      [&](const auto& m) -> std::optional<std::string> {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LinearMap>) {
          if (space.exponent() == 2.0) {
            Eigen::JacobiSVD<Matrix> svd(m.t);
            if (svd.singularValues()(0) <= 1.0 + kNormSlack) return "spectral norm <= 1";
            return std::nullopt;
          }
          if (riesz_thorin_bound(m.t, space.exponent()) <= 1.0 + kNormSlack) {
            return "Riesz-Thorin bound <= 1";
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<M, BoxProjection>) {
          return "coordinatewise 1-Lipschitz projection";
        } else if constexpr (std::is_same_v<M, BallProjection>) {
          if (space.exponent() == 2.0) return "Hilbert metric projection";
          return std::nullopt;
        } else {
          for (const auto& c : m.maps) {
            if (!c.certify(space)) return std::nullopt;
          }
          return "composition of certified maps";
        }
      },
      impl_->v);
}

const Matrix& NonexpansiveMap::linear_matrix() const {
  if (const auto* lin = std::get_if<LinearMap>(&impl_->v)) return lin->t;
  throw ContractViolation("nonexpansive map is not linear");
}
const Vector& NonexpansiveMap::box_lower() const {
  if (const auto* b = std::get_if<BoxProjection>(&impl_->v)) return b->lower;
  throw ContractViolation("nonexpansive map is not a box projection");
}
const Vector& NonexpansiveMap::box_upper() const {
  if (const auto* b = std::get_if<BoxProjection>(&impl_->v)) return b->upper;
  throw ContractViolation("nonexpansive map is not a box projection");
}
const Vector& NonexpansiveMap::ball_center() const {
  if (const auto* b = std::get_if<BallProjection>(&impl_->v)) return b->center;
  throw ContractViolation("nonexpansive map is not a ball projection");
}
double NonexpansiveMap::ball_radius() const {
  if (const auto* b = std::get_if<BallProjection>(&impl_->v)) return b->radius;
  throw ContractViolation("nonexpansive map is not a ball projection");
}
const std::vector<NonexpansiveMap>& NonexpansiveMap::components() const {
  if (const auto* c = std::get_if<Composition>(&impl_->v)) return c->maps;
  throw ContractViolation("nonexpansive map is not a composition");
}

// ---------------------------------------------------------------------------
// Operator

namespace {

struct PsdLinearNode {
  Matrix m;
};
struct ResidualNode {
  NonexpansiveMap t;
};
struct DiagonalNode {
  std::vector<ScalarFunction> g;
};
struct AffineNode {
  Operator base;
  Vector f;
};
struct SumNode {
  std::vector<Operator> terms;
};

constexpr int kConstructionSamples = 200;

} // namespace

struct Operator::Impl {
  std::variant<PsdLinearNode, ResidualNode, DiagonalNode, AffineNode, SumNode> v;
  int dim;
  ConstructionCheck check;
};

Operator Operator::psd_linear(Matrix m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw ContractViolation("PSD matrix must be square");
  if (!m.allFinite()) throw ContractViolation("matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ContractViolation("PsdLinear matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-12 * scale) {
    throw ContractViolation("PsdLinear matrix has negative eigenvalue " + std::to_string(min_eig));
  }
  const int d = static_cast<int>(m.rows());
  return Operator(std::make_shared<const Impl>(
      Impl{PsdLinearNode{std::move(m)}, d, {true, 0, "symmetric eigenvalues >= -1e-12"}}));
}

Operator Operator::unchecked_linear(Matrix m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw ContractViolation("matrix must be square");
  const int d = static_cast<int>(m.rows());
  return Operator(
      std::make_shared<const Impl>(Impl{PsdLinearNode{std::move(m)}, d, {false, 0, "unchecked"}}));
}

Operator Operator::residual_of_nonexpansive(NonexpansiveMap t, const Space& space,
                                            std::uint64_t seed) {
  if (t.dim() != space.dim()) throw ContractViolation("map dimension differs from space");
  if (t.kind() == NonexpansiveMap::Kind::Ball && space.exponent() != 2.0) {
    throw ContractViolation("ball projection is only supported in the Hilbert model");
  }
  const auto certificate = t.certify(space);

  Rng rng(derive_seed(seed, 0x6e6f6e6578ULL));
  for (int k = 0; k < kConstructionSamples; ++k) {
    const Vector x = 3.0 * gaussian_vector(rng, space.dim());
    const Vector y = 3.0 * gaussian_vector(rng, space.dim());
    const double lhs = space.norm(t.apply(x) - t.apply(y));
    const double rhs = space.norm(x - y);
    if (lhs > rhs * (1.0 + 1e-10) + 1e-14) {
      throw ContractViolation("map is not nonexpansive: ||Tx - Ty|| = " + std::to_string(lhs) +
                              " > ||x - y|| = " + std::to_string(rhs));
    }
  }
  ConstructionCheck check{certificate.has_value(), kConstructionSamples,
                          certificate ? *certificate : "sampled only (non-exhaustive)"};
  const int d = space.dim();
  return Operator(std::make_shared<const Impl>(Impl{ResidualNode{std::move(t)}, d, check}));
}

Operator Operator::diagonal_monotone(std::vector<ScalarFunction> g) {
  if (g.empty()) throw ContractViolation("diagonal operator needs at least one coordinate");
  constexpr int kGrid = 401;
  for (const auto& fn : g) {
    if (fn.linear < 0.0 || fn.cubic < 0.0 || fn.saturation < 0.0) {
      throw ContractViolation("scalar function coefficients must be >= 0 for monotonicity");
    }
    double prev = fn.value(-10.0);
    for (int k = 1; k < kGrid; ++k) {
      const double t = -10.0 + 20.0 * k / (kGrid - 1);
      const double cur = fn.value(t);
      if (cur < prev - 1e-12 * std::max(1.0, std::abs(prev))) {
        throw ContractViolation("scalar function is decreasing on the sample grid");
      }
      prev = cur;
    }
  }
  const int d = static_cast<int>(g.size());
  return Operator(std::make_shared<const Impl>(
      Impl{DiagonalNode{std::move(g)}, d, {true, kGrid, "nonnegative coefficients"}}));
}

Operator Operator::affine_residual(Operator base, Vector data) {
  if (data.size() != base.dim()) throw ContractViolation("data dimension differs from operator");
  if (!data.allFinite()) throw ContractViolation("data has non-finite entries");
  const int d = base.dim();
  ConstructionCheck check = base.construction_check();
  return Operator(
      std::make_shared<const Impl>(Impl{AffineNode{std::move(base), std::move(data)}, d, check}));
}

Operator Operator::sum(std::vector<Operator> terms) {
  if (terms.empty()) throw ContractViolation("sum needs at least one term");
  const int d = terms.front().dim();
  ConstructionCheck check{true, 0, "sum of accretive terms"};
  for (const auto& t : terms) {
    if (t.dim() != d) throw ContractViolation("sum of operators with different dimensions");
    check.exact = check.exact && t.construction_check().exact;
    check.samples = std::max(check.samples, t.construction_check().samples);
  }
  return Operator(std::make_shared<const Impl>(Impl{SumNode{std::move(terms)}, d, check}));
}

Operator::Kind Operator::kind() const { return static_cast<Kind>(impl_->v.index()); }
int Operator::dim() const { return impl_->dim; }
const ConstructionCheck& Operator::construction_check() const { return impl_->check; }

Vector Operator::apply(const Vector& x) const {
  if (x.size() != dim()) throw ContractViolation("dimension mismatch in operator apply");
  return std::visit(
      [&](const auto& n) -> Vector {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, PsdLinearNode>) {
          return n.m * x;
        } else if constexpr (std::is_same_v<N, ResidualNode>) {
          return x - n.t.apply(x);
        } else if constexpr (std::is_same_v<N, DiagonalNode>) {
          Vector out(x.size());
          for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = n.g[i].value(x[i]);
          return out;
        } else if constexpr (std::is_same_v<N, AffineNode>) {
          return n.base.apply(x) - n.f;
        } else {
          Vector out = n.terms.front().apply(x);
          for (std::size_t k = 1; k < n.terms.size(); ++k) out += n.terms[k].apply(x);
          return out;
        }
      },
      impl_->v);
}

Vector Operator::derivative_apply(const Vector& x, const Vector& v) const {
  if (x.size() != dim() || v.size() != dim()) {
    throw ContractViolation("dimension mismatch in derivative apply");
  }
  return std::visit(
      [&](const auto& n) -> Vector {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, PsdLinearNode>) {
          return n.m * v;
        } else if constexpr (std::is_same_v<N, ResidualNode>) {
          return v - n.t.derivative_apply(x, v);
        } else if constexpr (std::is_same_v<N, DiagonalNode>) {
          Vector out(v.size());
          for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = n.g[i].derivative(x[i]) * v[i];
          return out;
        } else if constexpr (std::is_same_v<N, AffineNode>) {
          return n.base.derivative_apply(x, v);
        } else {
          Vector out = n.terms.front().derivative_apply(x, v);
          for (std::size_t k = 1; k < n.terms.size(); ++k) out += n.terms[k].derivative_apply(x, v);
          return out;
        }
      },
      impl_->v);
}

bool Operator::differentiable() const {
  return std::visit(
      [&](const auto& n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ResidualNode>) {
          return n.t.matrix().has_value();
        } else if constexpr (std::is_same_v<N, AffineNode>) {
          return n.base.differentiable();
        } else if constexpr (std::is_same_v<N, SumNode>) {
          return std::all_of(n.terms.begin(), n.terms.end(),
                             [](const Operator& t) { return t.differentiable(); });
        } else {
          return true;
        }
      },
      impl_->v);
}

std::optional<AffineForm> Operator::affine_form() const {
  const int d = dim();
  return std::visit(
      [&](const auto& n) -> std::optional<AffineForm> {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, PsdLinearNode>) {
          return AffineForm{n.m, Vector::Zero(d)};
        } else if constexpr (std::is_same_v<N, ResidualNode>) {
          auto t = n.t.matrix();
          if (!t) return std::nullopt;
          return AffineForm{Matrix::Identity(d, d) - *t, Vector::Zero(d)};
        } else if constexpr (std::is_same_v<N, DiagonalNode>) {
          AffineForm form{Matrix::Zero(d, d), Vector::Zero(d)};
          for (int i = 0; i < d; ++i) {
            if (!n.g[i].is_affine()) return std::nullopt;
            form.matrix(i, i) = n.g[i].linear;
            form.data[i] = -n.g[i].offset;
          }
          return form;
        } else if constexpr (std::is_same_v<N, AffineNode>) {
          auto form = n.base.affine_form();
          if (!form) return std::nullopt;
          form->data += n.f;
          return form;
        } else {
          AffineForm acc{Matrix::Zero(d, d), Vector::Zero(d)};
          for (const auto& t : n.terms) {
            auto form = t.affine_form();
            if (!form) return std::nullopt;
            acc.matrix += form->matrix;
            acc.data += form->data;
          }
          return acc;
        }
      },
      impl_->v);
}

std::optional<NonexpansiveForm> Operator::nonexpansive_form() const {
  if (const auto* r = std::get_if<ResidualNode>(&impl_->v)) {
    return NonexpansiveForm{r->t, Vector::Zero(dim())};
  }
  if (const auto* a = std::get_if<AffineNode>(&impl_->v)) {
    auto form = a->base.nonexpansive_form();
    if (!form) return std::nullopt;
    form->shift += a->f;
    return form;
  }
  return std::nullopt;
}

const Matrix& Operator::matrix() const {
  if (const auto* n = std::get_if<PsdLinearNode>(&impl_->v)) return n->m;
  throw ContractViolation("operator is not PsdLinear");
}
const NonexpansiveMap& Operator::nonexpansive_map() const {
  if (const auto* n = std::get_if<ResidualNode>(&impl_->v)) return n->t;
  throw ContractViolation("operator is not ResidualOfNonexpansive");
}
const std::vector<ScalarFunction>& Operator::scalar_functions() const {
  if (const auto* n = std::get_if<DiagonalNode>(&impl_->v)) return n->g;
  throw ContractViolation("operator is not DiagonalMonotone");
}
const Operator& Operator::base() const {
  if (const auto* n = std::get_if<AffineNode>(&impl_->v)) return n->base;
  throw ContractViolation("operator is not AffineResidual");
}
const Vector& Operator::data() const {
  if (const auto* n = std::get_if<AffineNode>(&impl_->v)) return n->f;
  throw ContractViolation("operator is not AffineResidual");
}
const std::vector<Operator>& Operator::terms() const {
  if (const auto* n = std::get_if<SumNode>(&impl_->v)) return n->terms;
  throw ContractViolation("operator is not a Sum");
}

// ---------------------------------------------------------------------------
// Noise, constants, sampled checks

Operator perturb(const Operator& op, const NoiseSpec& noise, const Space& space) {
  if (op.kind() != Operator::Kind::AffineResidual) {
    throw ContractViolation("perturb requires an AffineResidual operator");
  }
  if (!(noise.h >= 0.0) || !(noise.delta >= 0.0) || !std::isfinite(noise.h) ||
      !std::isfinite(noise.delta)) {
    throw ContractViolation("noise levels must be finite and >= 0");
  }
  if (!(noise.growth_constant >= 0.0) || !(noise.growth_slope >= 0.0)) {
    throw ContractViolation("noise growth function must be nonnegative and nondecreasing");
  }
  if (op.dim() != space.dim()) throw ContractViolation("operator dimension differs from space");
  if (noise.h == 0.0 && noise.delta == 0.0) return op;

  const int d = op.dim();
  Operator base = op.base();
  Vector data = op.data();

  if (noise.h > 0.0) {
    Rng rng(derive_seed(noise.seed, 0x6f70ULL));
    const Vector slopes = uniform_vector(rng, d, 0.0, 0.5 * noise.growth_slope);
    Vector weights = uniform_vector(rng, d, 0.0, 1.0);
    const double wn = space.norm(weights);
    weights *= (wn > 0.0) ? 0.5 * noise.growth_constant / wn : 0.0;
    std::vector<ScalarFunction> g(d);
    for (int i = 0; i < d; ++i) {
      g[i].linear = noise.h * slopes[i];
      g[i].saturation = noise.h * weights[i];
    }
    base = Operator::sum({base, Operator::diagonal_monotone(std::move(g))});
  }
  if (noise.delta > 0.0) {
    Vector u;
    if (noise.direction) {
      if (noise.direction->size() != d) throw ContractViolation("noise direction dimension");
      const double un = space.norm(*noise.direction);
      if (un == 0.0) throw ContractViolation("noise direction must be nonzero");
      u = *noise.direction / un;
    } else {
      Rng rng(derive_seed(noise.seed, 0x6461ULL));
      u = random_vector_with_norm(rng, space, 1.0);
    }
    data += noise.delta * u;
  }
  return Operator::affine_residual(std::move(base), std::move(data));
}

double lipschitz_derivative_constant(const Operator& op, double box_radius) {
  if (!(box_radius > 0.0)) throw ContractViolation("box radius must be > 0");
  switch (op.kind()) {
  case Operator::Kind::PsdLinear:
    return 0.0;
  case Operator::Kind::ResidualOfNonexpansive:
    if (op.nonexpansive_map().matrix()) return 0.0;
    throw CapabilityError("derivative of a projection-based map is not Lipschitz");
  case Operator::Kind::DiagonalMonotone: {
    constexpr int kGrid = 2001;
    double sup = 0.0;
    for (const auto& g : op.scalar_functions()) {
      for (int k = 0; k < kGrid; ++k) {
        const double t = -box_radius + 2.0 * box_radius * k / (kGrid - 1);
        sup = std::max(sup, std::abs(g.second_derivative(t)));
      }
    }
    return 1.5 * sup;
  }
  case Operator::Kind::AffineResidual:
    return lipschitz_derivative_constant(op.base(), box_radius);
  case Operator::Kind::Sum: {
    double k = 0.0;
    for (const auto& t : op.terms()) k += lipschitz_derivative_constant(t, box_radius);
    return k;
  }
  }
  return 0.0;
}

namespace {

struct PairSample {
  double value;
  double normalized;
};

template <class Draw, class Rhs>
AccretivityReport sample_pairs(const Operator& op, const Space& space, int n_samples,
                               std::uint64_t seed, Draw&& draw, Rhs&& rhs) {
  if (n_samples < 1) throw ContractViolation("n_samples must be >= 1");
  if (op.dim() != space.dim()) throw ContractViolation("operator dimension differs from space");
  Rng rng(seed);
  AccretivityReport report;
  report.samples = n_samples;
  report.min_value = std::numeric_limits<double>::infinity();
  report.min_normalized_slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    const Vector x = draw(rng);
    const Vector y = draw(rng);
    const Vector da = op.apply(x) - op.apply(y);
    const Vector dx = x - y;
    const double pairing = dual_pair(da, space.duality_map(dx));
    const double slack = pairing - rhs(space.norm(da));
    const double scale = std::max(1.0, space.norm(da) * space.norm(dx));
    report.min_value = std::min(report.min_value, slack);
    report.min_normalized_slack = std::min(report.min_normalized_slack, slack / scale);
  }
  report.pass = report.min_normalized_slack >= -1e-12;
  return report;
}

} // namespace

AccretivityReport check_accretive(const Operator& op, const Space& space, int n_samples,
                                  std::uint64_t seed) {
  const int d = space.dim();
  return sample_pairs(
      op, space, n_samples, seed, [d](Rng& rng) { return gaussian_vector(rng, d); },
      [](double) { return 0.0; });
}

AccretivityReport check_inverse_uniform_accretive(const Operator& op, const Space& space,
                                                  double radius, int n_samples,
                                                  std::uint64_t seed) {
  if (!(radius > 0.0)) throw ContractViolation("radius must be > 0");
  if (!op.nonexpansive_form()) {
    throw CapabilityError("inverse uniform accretivity check needs an I - T operator");
  }
  const int d = space.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](Rng& rng) -> Vector {
    Vector dir = random_vector_with_norm(rng, space, 1.0);
    return dir * (radius * std::pow(unit(rng), 1.0 / d));
  };
  return sample_pairs(op, space, n_samples, seed, draw,
                      [&](double t) { return space.phi_inverse_uniform(radius, t); });
}

} // namespace pirm
