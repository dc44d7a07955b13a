#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

#include "rds/types.hpp"

namespace rds {

using Rng = std::mt19937_64;

/// Mixes a list of integers into one 64-bit seed (std::seed_seq based).
/// Used for content-addressed substreams: same inputs, same seed.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

/// Stable 64-bit FNV-1a hash of a byte range.
std::uint64_t fnv1a(std::span<const unsigned char> bytes);
std::uint64_t fnv1a(const std::string& text);

/// Hash of the exact bit pattern of a vector's entries.
std::uint64_t hash_coordinates(const Vector& v);

Vector gaussian_vector(Eigen::Index n, Rng& rng);
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Uniformly distributed point on the unit sphere of R^n.
Vector random_unit_vector(Eigen::Index n, Rng& rng);

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of diag(R) folded into Q.
Matrix haar_orthogonal(Eigen::Index m, Rng& rng);

/// n x m matrix with Haar-distributed orthonormal columns (m <= n).
Matrix haar_stiefel(Eigen::Index n, Eigen::Index m, Rng& rng);

}  // namespace rds
