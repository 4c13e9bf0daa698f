#pragma once

#include "space.hpp"

#include <cstdint>
#include <random>

namespace pirm {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a tuple of
/// indices (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

Vector gaussian_vector(Rng& rng, int dim);
Vector uniform_vector(Rng& rng, int dim, double lo, double hi);

/// Gaussian direction rescaled to the given norm in `space`.
Vector random_vector_with_norm(Rng& rng, const Space& space, double norm);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Matrix random_orthogonal(Rng& rng, int dim);

} // namespace pirm
