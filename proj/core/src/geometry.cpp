#include "rds/geometry.hpp"

#include <cmath>
#include <sstream>

#include "rds/random.hpp"

namespace rds {
namespace {

constexpr double kSphereTol = 1e-12;
constexpr double kSubspaceTol = 1e-10;
constexpr double kTangentTol = 1e-10;
constexpr int kBasisRetries = 8;

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entries");
}

void require_size(const Vector& v, int n, const char* what) {
  if (v.size() != n) {
    std::ostringstream os;
    os << what << ": expected ambient dimension " << n << ", got " << v.size();
    throw InvalidArgument(os.str());
  }
}

Vector sphere_exp(const Vector& y, const Vector& w) {
  const double t = w.norm();
  if (t == 0.0) return y / y.norm();
  Vector out = std::cos(t) * y + (std::sin(t) / t) * w;
  return out / out.norm();
}

Vector sphere_metric(const Vector& y, const Vector& w) {
  Vector out = y + w;
  return out / out.norm();
}

}  // namespace

Manifold Manifold::unit_sphere(int n) {
  if (n < 2) throw InvalidArgument("unit_sphere: n must be >= 2");
  return Manifold(ManifoldKind::UnitSphere, n - 1, n, nullptr);
}

Manifold Manifold::embedded_sphere(int m, int n) {
  if (m < 1) throw InvalidArgument("embedded_sphere: m must be >= 1");
  if (n < m + 1) throw InvalidArgument("embedded_sphere: requires n >= m + 1");
  return Manifold(ManifoldKind::EmbeddedSphere, m, n, nullptr);
}

Manifold Manifold::subspace(Matrix basis) {
  const auto n = basis.rows();
  const auto m = basis.cols();
  if (m < 1 || n < m) throw InvalidArgument("subspace: basis must be n x m with 1 <= m <= n");
  if (!basis.allFinite()) throw InvalidArgument("subspace: non-finite basis");
  const double dev = (basis.transpose() * basis - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  if (dev > 1e-12) throw InvalidArgument("subspace: basis columns are not orthonormal");
  return Manifold(ManifoldKind::Subspace, static_cast<int>(m), static_cast<int>(n),
                  std::make_shared<const Matrix>(std::move(basis)));
}

int Manifold::sphere_block() const {
  switch (kind_) {
    case ManifoldKind::UnitSphere: return n_;
    case ManifoldKind::EmbeddedSphere: return m_ + 1;
    case ManifoldKind::Subspace: return 0;
  }
  return 0;
}

const Matrix& Manifold::subspace_basis() const {
  if (kind_ != ManifoldKind::Subspace) throw InvalidArgument("subspace_basis: not a subspace manifold");
  return *basis_;
}

bool Manifold::operator==(const Manifold& other) const {
  if (kind_ != other.kind_ || m_ != other.m_ || n_ != other.n_) return false;
  if (kind_ != ManifoldKind::Subspace) return true;
  return basis_ == other.basis_ || *basis_ == *other.basis_;
}

std::string Manifold::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ManifoldKind::UnitSphere: os << "unit_sphere(n=" << n_ << ")"; break;
    case ManifoldKind::EmbeddedSphere: os << "embedded_sphere(m=" << m_ << ", n=" << n_ << ")"; break;
    case ManifoldKind::Subspace: os << "subspace(m=" << m_ << ", n=" << n_ << ")"; break;
  }
  return os.str();
}

ManifoldPoint::ManifoldPoint(Manifold manifold, Vector coords)
    : manifold_(std::move(manifold)), coords_(std::move(coords)) {
  require_size(coords_, manifold_.ambient_dim(), "ManifoldPoint");
  require_finite(coords_, "ManifoldPoint");
  switch (manifold_.kind()) {
    case ManifoldKind::UnitSphere:
    case ManifoldKind::EmbeddedSphere: {
      const int s = manifold_.sphere_block();
      if (std::abs(coords_.head(s).norm() - 1.0) > kSphereTol)
        throw InvalidArgument("ManifoldPoint: sphere block does not have unit norm");
      for (int i = s; i < manifold_.ambient_dim(); ++i)
        if (coords_[i] != 0.0) throw InvalidArgument("ManifoldPoint: trailing block must be exactly zero");
      break;
    }
    case ManifoldKind::Subspace: {
      const Matrix& z = manifold_.subspace_basis();
      const double off = (coords_ - z * (z.transpose() * coords_)).norm();
      if (off > kSubspaceTol) throw InvalidArgument("ManifoldPoint: point is not in the subspace");
      break;
    }
  }
}

double tangency_residual(const ManifoldPoint& x, const Vector& dir) {
  const Manifold& mf = x.manifold();
  switch (mf.kind()) {
    case ManifoldKind::UnitSphere: return std::abs(dir.dot(x.coords()));
    case ManifoldKind::EmbeddedSphere: {
      const int s = mf.sphere_block();
      double r = std::abs(dir.head(s).dot(x.coords().head(s)));
      if (mf.ambient_dim() > s) r = std::max(r, dir.tail(mf.ambient_dim() - s).cwiseAbs().maxCoeff());
      return r;
    }
    case ManifoldKind::Subspace: {
      const Matrix& z = mf.subspace_basis();
      return (dir - z * (z.transpose() * dir)).norm();
    }
  }
  return 0.0;
}

TangentVector::TangentVector(ManifoldPoint base, Vector dir) : base_(std::move(base)), dir_(std::move(dir)) {
  require_size(dir_, base_.manifold().ambient_dim(), "TangentVector");
  require_finite(dir_, "TangentVector");
  if (tangency_residual(base_, dir_) > kTangentTol * std::max(1.0, dir_.norm()))
    throw InvalidArgument("TangentVector: direction is not tangent at its base point");
}

ManifoldPoint project_to_manifold(const Manifold& manifold, const Vector& v) {
  require_size(v, manifold.ambient_dim(), "project_to_manifold");
  switch (manifold.kind()) {
    case ManifoldKind::UnitSphere:
    case ManifoldKind::EmbeddedSphere: {
      const int s = manifold.sphere_block();
      const double norm = v.head(s).norm();
      if (norm == 0.0) throw InvalidArgument("project_to_manifold: zero sphere block");
      Vector x = Vector::Zero(manifold.ambient_dim());
      x.head(s) = v.head(s) / norm;
      return ManifoldPoint(manifold, std::move(x));
    }
    case ManifoldKind::Subspace: {
      const Matrix& z = manifold.subspace_basis();
      return ManifoldPoint(manifold, z * (z.transpose() * v));
    }
  }
  throw InvalidArgument("project_to_manifold: unknown manifold");
}

ManifoldPoint random_point(const Manifold& manifold, std::uint64_t seed) {
  Rng rng(seed);
  switch (manifold.kind()) {
    case ManifoldKind::UnitSphere:
    case ManifoldKind::EmbeddedSphere: {
      Vector x = Vector::Zero(manifold.ambient_dim());
      x.head(manifold.sphere_block()) = random_unit_vector(manifold.sphere_block(), rng);
      return ManifoldPoint(manifold, std::move(x));
    }
    case ManifoldKind::Subspace:
      return ManifoldPoint(manifold, manifold.subspace_basis() * gaussian_vector(manifold.dim(), rng));
  }
  throw InvalidArgument("random_point: unknown manifold");
}

Vector tangent_project_coords(const ManifoldPoint& x, const Vector& v) {
  const Manifold& mf = x.manifold();
  require_size(v, mf.ambient_dim(), "tangent_project");
  switch (mf.kind()) {
    case ManifoldKind::UnitSphere: return v - x.coords() * x.coords().dot(v);
    case ManifoldKind::EmbeddedSphere: {
      const int s = mf.sphere_block();
      Vector out = Vector::Zero(mf.ambient_dim());
      const auto y = x.coords().head(s);
      out.head(s) = v.head(s) - y * y.dot(v.head(s));
      return out;
    }
    case ManifoldKind::Subspace: {
      const Matrix& z = mf.subspace_basis();
      return z * (z.transpose() * v);
    }
  }
  return v;
}

TangentVector tangent_project(const ManifoldPoint& x, const Vector& v) {
  return TangentVector(x, tangent_project_coords(x, v));
}

ManifoldPoint retract(const TangentVector& v, Retraction scheme) {
  const ManifoldPoint& x = v.base();
  const Manifold& mf = x.manifold();
  if (mf.kind() == ManifoldKind::Subspace) return ManifoldPoint(mf, x.coords() + v.dir());

  const int s = mf.sphere_block();
  Vector out = Vector::Zero(mf.ambient_dim());
  const Vector y = x.coords().head(s);
  const Vector w = v.dir().head(s);
  out.head(s) = scheme == Retraction::Exponential ? sphere_exp(y, w) : sphere_metric(y, w);
  return ManifoldPoint(mf, std::move(out));
}

TangentBasis tangent_basis(const ManifoldPoint& x, BasisMode mode) {
  const Manifold& mf = x.manifold();
  const int n = mf.ambient_dim();
  const int m = mf.dim();

  if (mf.kind() == ManifoldKind::Subspace) {
    const Matrix& z = mf.subspace_basis();
    if (!mode.randomized) return TangentBasis{x, z};
    Rng rng(derive_seed({mode.seed, 0}));
    return TangentBasis{x, z * haar_orthogonal(m, rng)};
  }

  // Sphere block: QR of a Gaussian matrix whose first column is replaced by
  // the point; the remaining Q columns span the tangent space.
  const int s = mf.sphere_block();
  const std::uint64_t stream = mode.randomized ? mode.seed : hash_coordinates(x.coords());
  for (int attempt = 0; attempt < kBasisRetries; ++attempt) {
    Rng rng(derive_seed({stream, static_cast<std::uint64_t>(attempt)}));
    Matrix a = gaussian_matrix(s, s, rng);
    a.col(0) = x.coords().head(s);
    Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix& packed = qr.matrixQR();
    bool degenerate = false;
    for (int i = 0; i < s; ++i)
      if (std::abs(packed(i, i)) < 1e-10) degenerate = true;
    if (degenerate) continue;
    const Matrix q = qr.householderQ();
    Matrix basis = Matrix::Zero(n, m);
    basis.topRows(s) = q.rightCols(s - 1);
    return TangentBasis{x, std::move(basis)};
  }
  throw NumericalFailure("tangent_basis: QR degenerate after retries");
}

TangentVector riemannian_gradient(const ManifoldPoint& x, const Vector& euclid_grad) {
  return tangent_project(x, euclid_grad);
}

}  // namespace rds
