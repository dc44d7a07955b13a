#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "rds/types.hpp"

namespace rds {

enum class ManifoldKind { UnitSphere, EmbeddedSphere, Subspace };

/// One of the three embedded submanifolds of R^n supported by the toolkit:
///
///  - UnitSphere(n):        S^{n-1} in R^n, dimension n - 1.
///  - EmbeddedSphere(m, n): S^m x {0} in R^n, i.e. the unit sphere of the
///                          leading m + 1 coordinates with the trailing
///                          n - m - 1 coordinates pinned at zero.
///  - Subspace(Z):          span of the orthonormal columns of Z (n x m).
///
/// All three use the ambient inner product as Riemannian metric. Values are
/// cheap to copy; the subspace basis is shared.
class Manifold {
 public:
  static Manifold unit_sphere(int n);
  static Manifold embedded_sphere(int m, int n);
  static Manifold subspace(Matrix basis);

  ManifoldKind kind() const { return kind_; }
  int ambient_dim() const { return n_; }
  int dim() const { return m_; }

  /// Number of leading coordinates constrained to the unit sphere
  /// (n for UnitSphere, m + 1 for EmbeddedSphere, 0 for Subspace).
  int sphere_block() const;

  /// Orthonormal basis Z of a Subspace manifold.
  const Matrix& subspace_basis() const;

  bool operator==(const Manifold& other) const;

  std::string describe() const;

 private:
  Manifold(ManifoldKind kind, int m, int n, std::shared_ptr<const Matrix> basis)
      : kind_(kind), m_(m), n_(n), basis_(std::move(basis)) {}

  ManifoldKind kind_;
  int m_;
  int n_;
  std::shared_ptr<const Matrix> basis_;
};

/// A point x on a manifold, stored by its ambient coordinates.
class ManifoldPoint {
 public:
  /// Validates the manifold membership tolerances; throws InvalidArgument.
  ManifoldPoint(Manifold manifold, Vector coords);

  const Manifold& manifold() const { return manifold_; }
  const Vector& coords() const { return coords_; }

 private:
  Manifold manifold_;
  Vector coords_;
};

/// A tangent vector v in T_x M, stored in ambient coordinates.
class TangentVector {
 public:
  /// Validates tangency at `base` to 1e-10 (relative to max(1, |dir|)).
  TangentVector(ManifoldPoint base, Vector dir);

  const ManifoldPoint& base() const { return base_; }
  const Vector& dir() const { return dir_; }
  double norm() const { return dir_.norm(); }

 private:
  ManifoldPoint base_;
  Vector dir_;
};

/// Orthonormal basis of a tangent space, one column per basis vector.
struct TangentBasis {
  ManifoldPoint base;
  Matrix vectors;  // n x m

  int size() const { return static_cast<int>(vectors.cols()); }
  TangentVector vector(int i) const { return TangentVector(base, vectors.col(i)); }
};

enum class Retraction { Metric, Exponential };

/// Canonical bases are reproducible functions of the point; randomized bases
/// are reproducible functions of (point, seed).
struct BasisMode {
  bool randomized = false;
  std::uint64_t seed = 0;

  static BasisMode canonical() { return {}; }
  static BasisMode random(std::uint64_t s) { return {true, s}; }
};

/// Closest point of the manifold to an ambient vector (normalization of the
/// sphere block or orthogonal projection onto the subspace).
ManifoldPoint project_to_manifold(const Manifold& manifold, const Vector& v);

/// Uniformly distributed sphere point, or Z g with g standard Gaussian.
ManifoldPoint random_point(const Manifold& manifold, std::uint64_t seed);

/// Orthogonal projection of v onto T_x M.
TangentVector tangent_project(const ManifoldPoint& x, const Vector& v);

/// Raw form of tangent_project for hot loops.
Vector tangent_project_coords(const ManifoldPoint& x, const Vector& v);

/// Metric retraction (x + v)/|x + v| or exponential map on the sphere
/// block; x + v for subspaces (both schemes coincide there).
ManifoldPoint retract(const TangentVector& v, Retraction scheme);

/// Orthonormal basis of T_x M.
TangentBasis tangent_basis(const ManifoldPoint& x, BasisMode mode);

/// grad f(x) = P_x(euclidean gradient).
TangentVector riemannian_gradient(const ManifoldPoint& x, const Vector& euclid_grad);

/// Residual measuring how far `dir` is from T_x M.
double tangency_residual(const ManifoldPoint& x, const Vector& dir);

}  // namespace rds
