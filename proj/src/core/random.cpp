#include "random.hpp"

#include "errors.hpp"

namespace pirm {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

Vector gaussian_vector(Rng& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  return v;
}

Vector uniform_vector(Rng& rng, int dim, double lo, double hi) {
  std::uniform_real_distribution<double> uniform(lo, hi);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = uniform(rng);
  return v;
}

Vector random_vector_with_norm(Rng& rng, const Space& space, double norm) {
  if (!(norm >= 0.0)) throw ContractViolation("requested norm must be >= 0");
  Vector v = gaussian_vector(rng, space.dim());
  double n = space.norm(v);
  while (n == 0.0) {
    v = gaussian_vector(rng, space.dim());
    n = space.norm(v);
  }
  return v * (norm / n);
}

Matrix random_orthogonal(Rng& rng, int dim) {
  Matrix g(dim, dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

} // namespace pirm
