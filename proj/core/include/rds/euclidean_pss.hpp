#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rds/types.hpp"

namespace rds {

enum class PssGenerator { PlusMinus, MinimalSum, UniformAngles, Custom };

std::string to_string(PssGenerator g);
PssGenerator pss_generator_from_string(const std::string& name);

/// A finite set of nonzero directions of R^m, stored one per column and kept
/// in construction order (polling order depends on it).
struct EuclideanPss {
  int dim = 0;
  Matrix directions;  // dim x cardinality
  PssGenerator generator = PssGenerator::Custom;
  std::optional<Matrix> rotation;

  int cardinality() const { return static_cast<int>(directions.cols()); }
};

/// {b_1, ..., b_m, -b_1, ..., -b_m}.
EuclideanPss pss_plus_minus(const Matrix& basis);

/// {b_1, ..., b_m, -(1/sqrt(m)) sum b_i}.
EuclideanPss pss_minimal_sum(const Matrix& basis);

/// m + 1 unit vectors with pairwise cosines -1/m, built from the Cholesky
/// factor of the matrix with unit diagonal and -1/m off the diagonal, then
/// mapped through `basis`.
EuclideanPss pss_uniform_angles(const Matrix& basis);

EuclideanPss make_pss(PssGenerator generator, const Matrix& basis);

/// Wraps raw directions (columns). Rejects zero directions.
EuclideanPss custom_pss(Matrix directions);

struct MeasureReport {
  double cosine_measure = 0.0;
  std::optional<double> complexity_measure;  // set only when cosine_measure > 0
  Vector witness;                            // unit vector achieving the min-max
  std::vector<int> active_set;               // directions attaining the max at the witness
  int cardinality = 0;
};

/// Enumeration limits for cosine_measure_exact.
struct CosineMeasureLimits {
  int max_dim = 12;
  int max_extra_directions = 8;  // |D| <= 2m + max_extra_directions
};

/// Exact cosine measure min_{|v|=1} max_d cos(d, v).
///
/// Every minimizer of the min-max is the unique point of some linearly
/// independent subset S of the (normalized) directions at which all members
/// of S have equal cosine, or (zero-valued case) a unit normal of an (m-1)
/// dimensional independent subset. The routine walks all independent subsets
/// of size 1..m depth-first, extending a Cholesky factor of the subset Gram
/// matrix one row at a time; a dependent extension prunes the whole subtree.
/// For each subset the candidate u_S = normalize(D_S G_S^{-1} 1) is tested
/// with both signs, and a candidate is admissible when no direction beats
/// the subset's common cosine by more than 1e-9.
MeasureReport cosine_measure_exact(const Matrix& directions, CosineMeasureLimits limits = {});
MeasureReport cosine_measure_exact(const EuclideanPss& pss, CosineMeasureLimits limits = {});

/// Monte-Carlo upper estimate of the cosine measure from `samples` uniform
/// unit vectors. Never below the exact value.
double cosine_measure_sampled(const Matrix& directions, long samples, std::uint64_t seed);
double cosine_measure_sampled(const EuclideanPss& pss, long samples, std::uint64_t seed);

/// |D| cm(D)^{-2}; throws InvalidArgument("not a PSS") when cm <= 0.
double complexity_measure(const EuclideanPss& pss);
double complexity_measure(const MeasureReport& report);

/// Haar-distributed orthogonal m x m matrix, deterministic per seed.
Matrix random_rotation(int m, std::uint64_t seed);

/// Max |B^T B - I|.
double orthogonality_defect(const Matrix& basis);

}  // namespace rds
