#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "rds/euclidean_pss.hpp"
#include "rds/geometry.hpp"

namespace rds {

enum class PollingStyle { Intrinsic, Projected };

std::string to_string(PollingStyle s);
PollingStyle polling_style_from_string(const std::string& name);

struct PollingConstruction {
  PollingStyle style = PollingStyle::Intrinsic;
  PssGenerator generator = PssGenerator::PlusMinus;
  bool randomized = false;
  std::optional<std::uint64_t> rotation_seed;
  double drop_tol = 0.0;  // projected only
};

/// Unit tangent directions at a point, in polling order.
struct TangentPollingSet {
  ManifoldPoint base;
  Matrix directions;  // n x cardinality, each column tangent at base
  PollingConstruction construction;
  int dropped_count = 0;

  int cardinality() const { return static_cast<int>(directions.cols()); }
  TangentVector direction(int i) const { return TangentVector(base, directions.col(i)); }
};

inline constexpr double kDefaultDropTol = 1e-12;

/// Maps each d of an R^m set through the isometry e_i -> basis_i.
TangentPollingSet intrinsic_pss(const TangentBasis& basis, const EuclideanPss& pss);

/// Projects each d of an R^n set onto T_x M and normalizes; directions with
/// |P_x d| <= drop_tol |d| are dropped and counted.
TangentPollingSet projected_pss(const ManifoldPoint& x, const EuclideanPss& pss,
                                double drop_tol = kDefaultDropTol);

/// Cosine measure of a polling set inside its tangent space, computed in
/// the coordinates of an orthonormal tangent basis.
MeasureReport tangent_cosine_measure(const TangentPollingSet& set, const TangentBasis& basis);

/// Polling strategy of the solver: how to build D_k at each iterate.
struct PollingStrategy {
  PollingStyle style = PollingStyle::Intrinsic;
  PssGenerator generator = PssGenerator::PlusMinus;
  bool rotate = false;
  std::uint64_t seed = 0;

  /// "intrinsic-plus_minus-rot" style identifier.
  std::string id() const;
};

/// Builds the polling set at x. With rotation, intrinsic sets use a fresh
/// random tangent basis and projected sets a fresh Haar rotation of R^n,
/// both drawn from `stream_seed`.
TangentPollingSet make_polling_set(const PollingStrategy& strategy, const ManifoldPoint& x,
                                   std::uint64_t stream_seed);

/// Sampled estimate of the family measures sup|D_x|, inf cm_x, and
/// chi = sup|D_x| / (inf cm_x)^2 (an upper bound on the true family
/// cosine measure from the sample).
struct FamilyMeasureEstimate {
  int sup_cardinality = 0;
  double inf_cosine_measure = 0.0;
  double chi = 0.0;
  int samples = 0;
};

using PollingFamily = std::function<TangentPollingSet(const ManifoldPoint&)>;

FamilyMeasureEstimate manifold_complexity_measure(const PollingFamily& family,
                                                  std::span<const ManifoldPoint> points);

}  // namespace rds
