#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rds/euclidean_pss.hpp"
#include "rds/random.hpp"

namespace rds {
namespace {

double minimal_sum_cm(int m) { return 1.0 / std::sqrt(m * m + 2.0 * (m - 1) * std::sqrt(m)); }

Matrix rotation2(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

// Independent oracle: max-cos evaluated on a fine grid of the unit circle.
double circle_grid_cm(const Matrix& d, double step) {
  Matrix dn = d;
  for (Eigen::Index j = 0; j < dn.cols(); ++j) dn.col(j).normalize();
  double best = 2.0;
  for (double t = 0.0; t < 2.0 * std::numbers::pi; t += step) {
    Vector v(2);
    v << std::cos(t), std::sin(t);
    best = std::min(best, (dn.transpose() * v).maxCoeff());
  }
  return best;
}

TEST(PlusMinus, OrderAndCardinality) {
  const EuclideanPss p = pss_plus_minus(Matrix::Identity(2, 2));
  Matrix expected(2, 4);
  expected << 1, 0, -1, 0, 0, 1, 0, -1;
  EXPECT_EQ(p.directions, expected);
  EXPECT_EQ(p.cardinality(), 4);
  EXPECT_EQ(pss_plus_minus(Matrix::Identity(1, 1)).directions, (Matrix(1, 2) << 1, -1).finished());
}

TEST(PlusMinus, RotatedBasisKeepsMeasure) {
  const EuclideanPss p = pss_plus_minus(rotation2(std::numbers::pi / 6));
  const double angles[] = {30, 120, 210, 300};
  for (int j = 0; j < 4; ++j) {
    const double a = angles[j] * std::numbers::pi / 180;
    EXPECT_NEAR(p.directions(0, j), std::cos(a), 1e-15);
    EXPECT_NEAR(p.directions(1, j), std::sin(a), 1e-15);
  }
  EXPECT_NEAR(cosine_measure_exact(p).cosine_measure, 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Generators, RejectNonOrthogonalBasis) {
  Matrix b = Matrix::Identity(3, 3);
  b(0, 1) = 1e-6;
  EXPECT_THROW(pss_plus_minus(b), InvalidArgument);
  EXPECT_THROW(pss_minimal_sum(b), InvalidArgument);
  EXPECT_THROW(pss_uniform_angles(b), InvalidArgument);
}

TEST(MinimalSum, Directions) {
  const EuclideanPss p = pss_minimal_sum(Matrix::Identity(2, 2));
  ASSERT_EQ(p.cardinality(), 3);
  EXPECT_NEAR(p.directions(0, 2), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(p.directions(1, 2), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(pss_minimal_sum(Matrix::Identity(1, 1)).directions, (Matrix(1, 2) << 1, -1).finished());
  EXPECT_NEAR(cosine_measure_exact(pss_minimal_sum(Matrix::Identity(4, 4))).cosine_measure, 1.0 / std::sqrt(28.0), 1e-12);
}

TEST(UniformAngles, PlanarCase) {
  const EuclideanPss p = pss_uniform_angles(Matrix::Identity(2, 2));
  Matrix expected(2, 3);
  expected << 1, -0.5, -0.5, 0, std::sqrt(3.0) / 2, -std::sqrt(3.0) / 2;
  EXPECT_LE((p.directions - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(pss_uniform_angles(Matrix::Identity(1, 1)).directions, (Matrix(1, 2) << 1, -1).finished());
}

TEST(UniformAngles, UnitNormsAndEqualAngles) {
  for (int m = 1; m <= 10; ++m) {
    const EuclideanPss p = pss_uniform_angles(random_rotation(m, m));
    ASSERT_EQ(p.cardinality(), m + 1);
    const Matrix g = p.directions.transpose() * p.directions;
    for (int i = 0; i <= m; ++i) {
      EXPECT_NEAR(g(i, i), 1.0, 1e-12);
      for (int j = 0; j < i; ++j) EXPECT_NEAR(g(i, j), -1.0 / m, 1e-10);
    }
  }
}

TEST(CosineMeasure, ClosedFormsUpToDimensionEight) {
  for (int m = 1; m <= 8; ++m) {
    const Matrix id = Matrix::Identity(m, m);
    EXPECT_NEAR(cosine_measure_exact(pss_plus_minus(id)).cosine_measure, 1.0 / std::sqrt(m), 1e-9) << m;
    EXPECT_NEAR(cosine_measure_exact(pss_minimal_sum(id)).cosine_measure, minimal_sum_cm(m), 1e-9) << m;
    EXPECT_NEAR(cosine_measure_exact(pss_uniform_angles(id)).cosine_measure, 1.0 / m, 1e-9) << m;
  }
}

TEST(CosineMeasure, NonSpanningPairInThePlane) {
  const MeasureReport r = cosine_measure_exact(Matrix::Identity(2, 2));
  EXPECT_NEAR(r.cosine_measure, -1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.witness[0], -1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.witness[1], -1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_FALSE(r.complexity_measure.has_value());
  const double grid = circle_grid_cm(Matrix::Identity(2, 2), 1e-4);
  EXPECT_LE(r.cosine_measure, grid + 1e-12);
  EXPECT_NEAR(r.cosine_measure, grid, 1e-4);
}

TEST(CosineMeasure, SingleDirectionOnTheLine) {
  const MeasureReport r = cosine_measure_exact(Matrix::Ones(1, 1));
  EXPECT_DOUBLE_EQ(r.cosine_measure, -1.0);
  EXPECT_DOUBLE_EQ(r.witness[0], -1.0);
}

TEST(CosineMeasure, OppositePairInThePlaneHasZeroMeasure) {
  Matrix d(2, 2);
  d << 1, -1, 0, 0;
  EXPECT_NEAR(cosine_measure_exact(d).cosine_measure, 0.0, 1e-15);
}

TEST(CosineMeasure, MatchesCircleGridOnRandomSets) {
  Rng rng(21);
  for (int t = 0; t < 30; ++t) {
    const int r = 2 + static_cast<int>(rng() % 6);
    const Matrix d = gaussian_matrix(2, r, rng);
    const double exact = cosine_measure_exact(d).cosine_measure;
    const double grid = circle_grid_cm(d, 1e-4);
    EXPECT_LE(exact, grid + 1e-12) << t;
    EXPECT_NEAR(exact, grid, 1e-4) << t;
  }
}

TEST(CosineMeasure, WitnessAttainsTheValue) {
  Rng rng(22);
  for (int t = 0; t < 20; ++t) {
    const int m = 2 + t % 4;
    Matrix d = gaussian_matrix(m, 2 * m + 1, rng);
    const MeasureReport r = cosine_measure_exact(d);
    for (Eigen::Index j = 0; j < d.cols(); ++j) d.col(j).normalize();
    EXPECT_NEAR(r.witness.norm(), 1.0, 1e-12);
    EXPECT_NEAR((d.transpose() * r.witness).maxCoeff(), r.cosine_measure, 1e-9);
    for (int j : r.active_set) EXPECT_NEAR(d.col(j).dot(r.witness), r.cosine_measure, 1e-9);
  }
}

TEST(CosineMeasure, InvariantUnderRotationAndScaling) {
  Rng rng(23);
  for (int t = 0; t < 20; ++t) {
    const int m = 2 + t % 4;
    const Matrix d = gaussian_matrix(m, m + 3, rng);
    const double base = cosine_measure_exact(d).cosine_measure;
    const Matrix q = random_rotation(m, rng());
    Vector scales(d.cols());
    for (Eigen::Index j = 0; j < scales.size(); ++j) scales[j] = 0.1 + 5.0 * std::uniform_real_distribution<>()(rng);
    EXPECT_NEAR(cosine_measure_exact(Matrix(q * d * scales.asDiagonal())).cosine_measure, base, 1e-9);
  }
}

TEST(CosineMeasure, MonotoneUnderAddingDirections) {
  Rng rng(24);
  for (int t = 0; t < 20; ++t) {
    const int m = 2 + t % 3;
    Matrix d = gaussian_matrix(m, m + 2, rng);
    const double before = cosine_measure_exact(d).cosine_measure;
    d.conservativeResize(Eigen::NoChange, d.cols() + 1);
    d.col(d.cols() - 1) = gaussian_vector(m, rng);
    EXPECT_GE(cosine_measure_exact(d).cosine_measure, before - 1e-12);
  }
}

TEST(CosineMeasure, RotatedPlusMinusInDimensionFive) {
  for (std::uint64_t s = 0; s < 20; ++s)
    EXPECT_NEAR(cosine_measure_exact(pss_plus_minus(random_rotation(5, s))).cosine_measure, 1.0 / std::sqrt(5.0), 1e-9);
}

TEST(CosineMeasure, RejectsZeroDirectionAndOversizedInput) {
  Matrix d = Matrix::Identity(3, 3);
  d.col(1).setZero();
  EXPECT_THROW(cosine_measure_exact(d), InvalidArgument);
  EXPECT_THROW(cosine_measure_exact(pss_plus_minus(Matrix::Identity(13, 13))), BudgetExceeded);
  Rng rng(1);
  EXPECT_THROW(cosine_measure_exact(gaussian_matrix(10, 40, rng)), BudgetExceeded);
}

TEST(SampledMeasure, IsAnUpperEstimateThatConverges) {
  EXPECT_NEAR(cosine_measure_sampled(pss_plus_minus(Matrix::Identity(2, 2)), 1000000, 1), 1.0 / std::sqrt(2.0), 2e-3);
  EXPECT_NEAR(cosine_measure_sampled(pss_uniform_angles(Matrix::Identity(3, 3)), 1000000, 2), 1.0 / 3.0, 5e-3);
  Rng rng(25);
  for (int t = 0; t < 10; ++t) {
    const Matrix d = gaussian_matrix(3, 5, rng);
    EXPECT_GE(cosine_measure_sampled(d, 2000, t), cosine_measure_exact(d).cosine_measure - 1e-12);
  }
}

TEST(SampledMeasure, DeterministicPerSeed) {
  const EuclideanPss p = pss_minimal_sum(Matrix::Identity(3, 3));
  EXPECT_EQ(cosine_measure_sampled(p, 5000, 9), cosine_measure_sampled(p, 5000, 9));
}

TEST(ComplexityMeasure, TableValues) {
  for (int m = 1; m <= 6; ++m) {
    const Matrix id = Matrix::Identity(m, m);
    EXPECT_NEAR(complexity_measure(pss_plus_minus(id)), 2.0 * m * m, 1e-9 * m * m);
    EXPECT_NEAR(complexity_measure(pss_minimal_sum(id)), (m + 1) * (m * m + 2 * (m - 1) * std::sqrt(m)),
                1e-9 * m * m * m);
  }
  EXPECT_NEAR(complexity_measure(pss_uniform_angles(Matrix::Identity(4, 4))), 80.0, 1e-8);
  EXPECT_NEAR(complexity_measure(pss_plus_minus(Matrix::Identity(1, 1))), 2.0, 1e-15);
  EXPECT_THROW(complexity_measure(custom_pss(Matrix::Identity(2, 2))), InvalidArgument);
}

TEST(RandomRotation, OrthogonalAndDeterministic) {
  const Matrix one = random_rotation(1, 3);
  EXPECT_EQ(std::abs(one(0, 0)), 1.0);
  for (int m : {2, 5, 12}) {
    const Matrix q = random_rotation(m, 42);
    EXPECT_LE(orthogonality_defect(q), 1e-12);
    EXPECT_EQ(q, random_rotation(m, 42));
    EXPECT_NE(q, random_rotation(m, 43));
  }
}

TEST(GeneratorNames, RoundTrip) {
  for (PssGenerator g : {PssGenerator::PlusMinus, PssGenerator::MinimalSum, PssGenerator::UniformAngles, PssGenerator::Custom})
    EXPECT_EQ(pss_generator_from_string(to_string(g)), g);
  EXPECT_THROW(pss_generator_from_string("plusminus"), InvalidArgument);
}

}  // namespace
}  // namespace rds
