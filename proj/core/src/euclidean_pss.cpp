#include "rds/euclidean_pss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rds/random.hpp"

namespace rds {
namespace {

constexpr double kOrthoTol = 1e-12;
constexpr double kPivotTol = 1e-12;
constexpr double kAdmissibleTol = 1e-9;

void require_orthogonal(const Matrix& basis, const char* what) {
  if (basis.rows() != basis.cols() || basis.rows() < 1)
    throw InvalidArgument(std::string(what) + ": basis must be a nonempty square matrix");
  if (orthogonality_defect(basis) > kOrthoTol)
    throw InvalidArgument(std::string(what) + ": basis is not orthogonal");
}

Matrix normalized_columns(const Matrix& directions) {
  Matrix out = directions;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw InvalidArgument("cosine measure: zero or non-finite direction at index " + std::to_string(j));
    out.col(j) /= norm;
  }
  return out;
}

// Number of subsets of size 1..k of an r-element set, saturating.
double subset_count(int r, int k) {
  double total = 0.0;
  double binom = 1.0;
  for (int s = 1; s <= std::min(k, r); ++s) {
    binom = binom * (r - s + 1) / s;
    total += binom;
  }
  return total;
}

class SubsetEnumerator {
 public:
  explicit SubsetEnumerator(const Matrix& unit_dirs)
      : dirs_(unit_dirs),
        m_(static_cast<int>(unit_dirs.rows())),
        r_(static_cast<int>(unit_dirs.cols())),
        gram_(unit_dirs.transpose() * unit_dirs),
        chol_(Matrix::Zero(m_, m_)),
        ones_solve_(Vector::Zero(m_)),
        subset_(m_, 0) {}

  void run() {
    if (m_ == 1) {
      // Unit normals of the empty subset.
      consider(Vector::Constant(1, 1.0), 0.0);
      consider(Vector::Constant(1, -1.0), 0.0);
    }
    descend(0, 0);
    if (max_rank_ < m_) {
      // The directions span a proper subspace; any unit vector orthogonal to
      // it has max-cosine exactly zero.
      Eigen::JacobiSVD<Matrix> svd(dirs_, Eigen::ComputeFullU);
      const Vector u = svd.matrixU().col(m_ - 1);
      consider(u, 0.0);
      consider(-u, 0.0);
    }
  }

  bool has_admissible() const { return admissible_.found; }
  const Vector& witness() const { return admissible_.found ? admissible_.u : any_.u; }
  double value() const { return admissible_.found ? admissible_.value : any_.value; }

 private:
  struct Best {
    bool found = false;
    double value = std::numeric_limits<double>::infinity();
    Vector u;
  };

  void descend(int start, int depth) {
    for (int j = start; j < r_; ++j) {
      Vector w(depth);
      for (int i = 0; i < depth; ++i) w[i] = gram_(subset_[i], j);
      if (depth > 0)
        chol_.topLeftCorner(depth, depth).triangularView<Eigen::Lower>().solveInPlace(w);
      const double pivot2 = 1.0 - w.squaredNorm();
      if (pivot2 <= kPivotTol) continue;  // dependent; so is every superset
      const double pivot = std::sqrt(pivot2);
      chol_.row(depth).head(depth) = w.transpose();
      chol_(depth, depth) = pivot;
      ones_solve_[depth] = (1.0 - w.dot(ones_solve_.head(depth))) / pivot;
      subset_[depth] = j;
      const int size = depth + 1;
      max_rank_ = std::max(max_rank_, size);

      const auto lower = chol_.topLeftCorner(size, size).triangularView<Eigen::Lower>();
      const Vector coeffs = lower.transpose().solve(ones_solve_.head(size));
      Vector u = Vector::Zero(m_);
      for (int i = 0; i < size; ++i) u += coeffs[i] * dirs_.col(subset_[i]);
      const double unorm = u.norm();
      if (unorm > 0.0) {
        u /= unorm;
        const double gamma = 1.0 / ones_solve_.head(size).norm();
        consider(u, gamma);
        consider(-u, -gamma);
      }

      if (size == m_ - 1) normal_candidate(size);
      if (size < m_) descend(j + 1, size);
    }
  }

  void normal_candidate(int size) {
    Matrix ds(m_, size);
    for (int i = 0; i < size; ++i) ds.col(i) = dirs_.col(subset_[i]);
    // Q^T = L^{-1} D_S^T has orthonormal rows spanning the subset.
    const Matrix qt = chol_.topLeftCorner(size, size).triangularView<Eigen::Lower>().solve(ds.transpose());
    Eigen::Index best = 0;
    (1.0 - qt.colwise().squaredNorm().array()).maxCoeff(&best);
    Vector normal = -qt.transpose() * qt.col(best);
    normal[best] += 1.0;
    const double nn = normal.norm();
    if (!(nn > 0.0)) return;
    normal /= nn;
    consider(normal, 0.0);
    consider(-normal, 0.0);
  }

  void consider(const Vector& u, double local_value) {
    const double g = (dirs_.transpose() * u).maxCoeff();
    if (g < any_.value) any_ = {true, g, u};
    if (g <= local_value + kAdmissibleTol && g < admissible_.value) admissible_ = {true, g, u};
  }

  const Matrix& dirs_;
  int m_;
  int r_;
  Matrix gram_;
  Matrix chol_;
  Vector ones_solve_;
  std::vector<int> subset_;
  int max_rank_ = 0;
  Best any_;
  Best admissible_;
};

}  // namespace

std::string to_string(PssGenerator g) {
  switch (g) {
    case PssGenerator::PlusMinus: return "plus_minus";
    case PssGenerator::MinimalSum: return "minimal_sum";
    case PssGenerator::UniformAngles: return "uniform_angles";
    case PssGenerator::Custom: return "custom";
  }
  return "custom";
}

PssGenerator pss_generator_from_string(const std::string& name) {
  if (name == "plus_minus") return PssGenerator::PlusMinus;
  if (name == "minimal_sum") return PssGenerator::MinimalSum;
  if (name == "uniform_angles") return PssGenerator::UniformAngles;
  if (name == "custom") return PssGenerator::Custom;
  throw InvalidArgument("unknown PSS generator '" + name + "'");
}

double orthogonality_defect(const Matrix& basis) {
  const auto k = basis.cols();
  return (basis.transpose() * basis - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
}

EuclideanPss pss_plus_minus(const Matrix& basis) {
  require_orthogonal(basis, "pss_plus_minus");
  const auto m = basis.rows();
  EuclideanPss out;
  out.dim = static_cast<int>(m);
  out.generator = PssGenerator::PlusMinus;
  out.directions.resize(m, 2 * m);
  out.directions.leftCols(m) = basis;
  out.directions.rightCols(m) = -basis;
  out.rotation = basis;
  return out;
}

EuclideanPss pss_minimal_sum(const Matrix& basis) {
  require_orthogonal(basis, "pss_minimal_sum");
  const auto m = basis.rows();
  EuclideanPss out;
  out.dim = static_cast<int>(m);
  out.generator = PssGenerator::MinimalSum;
  out.directions.resize(m, m + 1);
  out.directions.leftCols(m) = basis;
  out.directions.col(m) = -basis.rowwise().sum() / std::sqrt(static_cast<double>(m));
  out.rotation = basis;
  return out;
}

EuclideanPss pss_uniform_angles(const Matrix& basis) {
  require_orthogonal(basis, "pss_uniform_angles");
  const auto m = basis.rows();
  Matrix g = Matrix::Constant(m, m, -1.0 / static_cast<double>(m));
  g.diagonal().setOnes();
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalFailure("pss_uniform_angles: Cholesky failed");
  // Columns of L^T are the rows of L.
  const Matrix v = llt.matrixL().toDenseMatrix().transpose();
  EuclideanPss out;
  out.dim = static_cast<int>(m);
  out.generator = PssGenerator::UniformAngles;
  out.directions.resize(m, m + 1);
  out.directions.leftCols(m) = basis * v;
  out.directions.col(m) = -out.directions.leftCols(m).rowwise().sum();
  out.rotation = basis;
  return out;
}

EuclideanPss make_pss(PssGenerator generator, const Matrix& basis) {
  switch (generator) {
    case PssGenerator::PlusMinus: return pss_plus_minus(basis);
    case PssGenerator::MinimalSum: return pss_minimal_sum(basis);
    case PssGenerator::UniformAngles: return pss_uniform_angles(basis);
    case PssGenerator::Custom: break;
  }
  throw InvalidArgument("make_pss: custom sets need explicit directions");
}

EuclideanPss custom_pss(Matrix directions) {
  if (directions.rows() < 1 || directions.cols() < 1) throw InvalidArgument("custom_pss: empty direction set");
  for (Eigen::Index j = 0; j < directions.cols(); ++j)
    if (!(directions.col(j).norm() > 0.0)) throw InvalidArgument("custom_pss: zero direction");
  EuclideanPss out;
  out.dim = static_cast<int>(directions.rows());
  out.directions = std::move(directions);
  out.generator = PssGenerator::Custom;
  return out;
}

namespace {

// 1/cm^2 = 1^T G_S^+ 1 over the active set S when the witness lies in its
// span; avoids the sqrt round trip, so integral values come out exact.
double inverse_square_measure(const Matrix& unit, const MeasureReport& report) {
  const double fallback = 1.0 / (report.cosine_measure * report.cosine_measure);
  Matrix active(unit.rows(), static_cast<Eigen::Index>(report.active_set.size()));
  for (std::size_t j = 0; j < report.active_set.size(); ++j)
    active.col(static_cast<Eigen::Index>(j)) = unit.col(report.active_set[j]);
  const Matrix gram = active.transpose() * active;
  const Vector ones = Vector::Ones(gram.rows());
  const Vector y = gram.completeOrthogonalDecomposition().solve(ones);
  const double s = ones.dot(y);
  if (!(s > 0.0) || std::abs(1.0 / std::sqrt(s) - report.cosine_measure) > 1e-12) return fallback;
  return s;
}

}  // namespace

MeasureReport cosine_measure_exact(const Matrix& directions, CosineMeasureLimits limits) {
  const int m = static_cast<int>(directions.rows());
  const int r = static_cast<int>(directions.cols());
  if (m < 1 || r < 1) throw InvalidArgument("cosine_measure_exact: empty direction set");
  const Matrix unit = normalized_columns(directions);
  const double budget = subset_count(2 * limits.max_dim + limits.max_extra_directions, limits.max_dim);
  if (m > limits.max_dim || subset_count(r, m) > budget) {
    std::ostringstream os;
    os << "cosine_measure_exact: enumeration budget exceeded (m=" << m << ", |D|=" << r
       << "); use cosine_measure_sampled instead";
    throw BudgetExceeded(os.str());
  }

  SubsetEnumerator enumerator(unit);
  enumerator.run();

  MeasureReport report;
  report.cardinality = r;
  report.witness = enumerator.witness();
  const Vector cosines = unit.transpose() * report.witness;
  report.cosine_measure = cosines.maxCoeff();
  for (int j = 0; j < r; ++j)
    if (cosines[j] >= report.cosine_measure - kAdmissibleTol) report.active_set.push_back(j);
  if (report.cosine_measure > 0.0) report.complexity_measure = r * inverse_square_measure(unit, report);
  return report;
}

MeasureReport cosine_measure_exact(const EuclideanPss& pss, CosineMeasureLimits limits) {
  return cosine_measure_exact(pss.directions, limits);
}

double cosine_measure_sampled(const Matrix& directions, long samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("cosine_measure_sampled: samples must be >= 1");
  const Matrix unit = normalized_columns(directions);
  const auto m = unit.rows();
  Rng rng(seed);
  constexpr long kBatch = 4096;
  double best = std::numeric_limits<double>::infinity();
  for (long done = 0; done < samples; done += kBatch) {
    const long count = std::min(kBatch, samples - done);
    Matrix v = gaussian_matrix(m, count, rng);
    for (long j = 0; j < count; ++j) {
      const double norm = v.col(j).norm();
      if (norm > 0.0) v.col(j) /= norm;
    }
    const Matrix cosines = unit.transpose() * v;
    best = std::min(best, cosines.colwise().maxCoeff().minCoeff());
  }
  return best;
}

double cosine_measure_sampled(const EuclideanPss& pss, long samples, std::uint64_t seed) {
  return cosine_measure_sampled(pss.directions, samples, seed);
}

double complexity_measure(const MeasureReport& report) {
  if (!(report.cosine_measure > 0.0))
    throw InvalidArgument("complexity_measure: not a PSS (cosine measure <= 0)");
  if (report.complexity_measure) return *report.complexity_measure;
  return report.cardinality / (report.cosine_measure * report.cosine_measure);
}

double complexity_measure(const EuclideanPss& pss) { return complexity_measure(cosine_measure_exact(pss)); }

Matrix random_rotation(int m, std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("random_rotation: m must be >= 1");
  Rng rng(seed);
  return haar_orthogonal(m, rng);
}

}  // namespace rds
