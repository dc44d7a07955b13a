#include "rds/tangent_pss.hpp"

#include <algorithm>
#include <limits>

#include "rds/random.hpp"

namespace rds {

std::string to_string(PollingStyle s) { return s == PollingStyle::Intrinsic ? "intrinsic" : "projected"; }

PollingStyle polling_style_from_string(const std::string& name) {
  if (name == "intrinsic") return PollingStyle::Intrinsic;
  if (name == "projected") return PollingStyle::Projected;
  throw InvalidArgument("unknown polling style '" + name + "'");
}

TangentPollingSet intrinsic_pss(const TangentBasis& basis, const EuclideanPss& pss) {
  const ManifoldPoint& x = basis.base;
  const int m = x.manifold().dim();
  if (basis.vectors.rows() != x.manifold().ambient_dim() || basis.vectors.cols() != m)
    throw InvalidArgument("intrinsic_pss: basis shape does not match the manifold");
  if (pss.dim != m) throw InvalidArgument("intrinsic_pss: PSS dimension differs from manifold dimension");
  if (orthogonality_defect(basis.vectors) > 1e-10) throw InvalidArgument("intrinsic_pss: basis is not orthonormal");
  for (int i = 0; i < m; ++i)
    if (tangency_residual(x, basis.vectors.col(i)) > 1e-10)
      throw InvalidArgument("intrinsic_pss: basis vector is not tangent");

  TangentPollingSet out{x, basis.vectors * pss.directions, {}, 0};
  out.construction.style = PollingStyle::Intrinsic;
  out.construction.generator = pss.generator;
  return out;
}

TangentPollingSet projected_pss(const ManifoldPoint& x, const EuclideanPss& pss, double drop_tol) {
  const int n = x.manifold().ambient_dim();
  if (pss.dim != n) throw InvalidArgument("projected_pss: PSS dimension differs from ambient dimension");
  Matrix kept(n, pss.cardinality());
  int count = 0;
  for (int j = 0; j < pss.cardinality(); ++j) {
    const Vector d = pss.directions.col(j);
    const Vector p = tangent_project_coords(x, d);
    const double norm = p.norm();
    if (norm > drop_tol * d.norm()) kept.col(count++) = p / norm;
  }
  if (count == 0) throw InvalidArgument("projected_pss: empty projected set");
  TangentPollingSet out{x, kept.leftCols(count), {}, pss.cardinality() - count};
  out.construction.style = PollingStyle::Projected;
  out.construction.generator = pss.generator;
  out.construction.drop_tol = drop_tol;
  return out;
}

MeasureReport tangent_cosine_measure(const TangentPollingSet& set, const TangentBasis& basis) {
  if (basis.vectors.rows() != set.directions.rows())
    throw InvalidArgument("tangent_cosine_measure: basis and set live in different spaces");
  if (orthogonality_defect(basis.vectors) > 1e-10)
    throw InvalidArgument("tangent_cosine_measure: basis is not orthonormal");
  // Basis coordinates are an isometry of T_x M onto R^m.
  return cosine_measure_exact(Matrix(basis.vectors.transpose() * set.directions));
}

std::string PollingStrategy::id() const {
  return to_string(style) + "-" + to_string(generator) + (rotate ? "-rot" : "-fixed");
}

TangentPollingSet make_polling_set(const PollingStrategy& strategy, const ManifoldPoint& x,
                                   std::uint64_t stream_seed) {
  const Manifold& mf = x.manifold();
  if (strategy.style == PollingStyle::Intrinsic) {
    const int m = mf.dim();
    const EuclideanPss pss = make_pss(strategy.generator, Matrix::Identity(m, m));
    const BasisMode mode = strategy.rotate ? BasisMode::random(stream_seed) : BasisMode::canonical();
    TangentPollingSet out = intrinsic_pss(tangent_basis(x, mode), pss);
    out.construction.randomized = strategy.rotate;
    if (strategy.rotate) out.construction.rotation_seed = stream_seed;
    return out;
  }
  const int n = mf.ambient_dim();
  const Matrix rotation = strategy.rotate ? random_rotation(n, stream_seed) : Matrix::Identity(n, n);
  TangentPollingSet out = projected_pss(x, make_pss(strategy.generator, rotation));
  out.construction.randomized = strategy.rotate;
  if (strategy.rotate) out.construction.rotation_seed = stream_seed;
  return out;
}

FamilyMeasureEstimate manifold_complexity_measure(const PollingFamily& family,
                                                  std::span<const ManifoldPoint> points) {
  if (points.empty()) throw InvalidArgument("manifold_complexity_measure: empty sample");
  FamilyMeasureEstimate est;
  est.inf_cosine_measure = std::numeric_limits<double>::infinity();
  for (const ManifoldPoint& x : points) {
    const TangentPollingSet set = family(x);
    const MeasureReport report = tangent_cosine_measure(set, tangent_basis(x, BasisMode::canonical()));
    est.sup_cardinality = std::max(est.sup_cardinality, set.cardinality());
    est.inf_cosine_measure = std::min(est.inf_cosine_measure, report.cosine_measure);
  }
  est.samples = static_cast<int>(points.size());
  if (!(est.inf_cosine_measure > 0.0))
    throw InvalidArgument("manifold_complexity_measure: sampled family is not a PSS");
  est.chi = est.sup_cardinality / (est.inf_cosine_measure * est.inf_cosine_measure);
  return est;
}

}  // namespace rds
