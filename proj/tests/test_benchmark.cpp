#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "rds/benchmark.hpp"
#include "rds/random.hpp"
#include "rds/serialization.hpp"

namespace rds {
namespace {

BenchRecord synthetic(const std::string& id, PollingStyle style, std::uint64_t instance, double final_f,
                      std::vector<std::pair<long, double>> history, int m = 2) {
  BenchRecord r;
  r.spec = {ProblemFamily::StronglyConvexQuadratic, m, m + 2, instance};
  r.solver_id = id;
  r.strategy = {style, PssGenerator::PlusMinus, true, 0};
  r.f0 = history.front().second;
  r.final_f = final_f;
  r.history = std::move(history);
  r.evals = r.history.back().first;
  return r;
}

TEST(GenerateInstance, BarycenterAmbientOptimum) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const BenchmarkInstance inst = generate_instance({ProblemFamily::BarycenterAmbient, 3, 7, s});
    const Matrix& z = inst.problem.manifold().subspace_basis();
    Rng rng(1);
    const ManifoldPoint x0(inst.problem.manifold(), Vector::Zero(7));
    const Vector g0 = z.transpose() * inst.problem.euclid_gradient(x0);
    const Vector ystar = -g0 / (2.0 * kBarycenterPoints);
    const ManifoldPoint xs(inst.problem.manifold(), z * ystar);
    EXPECT_NEAR(inst.problem.objective(xs), inst.f_star, 1e-10 * std::max(1.0, std::abs(inst.f_star)));
    EXPECT_LE((z.transpose() * inst.problem.euclid_gradient(xs)).norm(), 1e-10);
    for (int t = 0; t < 10; ++t) {
      const ManifoldPoint p = random_point(inst.problem.manifold(), rng());
      EXPECT_GE(inst.problem.objective(p), inst.f_star - 1e-10);
    }
  }
}

TEST(GenerateInstance, BarycenterOnManifoldPointsLieOnTheSubspace) {
  const BenchmarkInstance inst = generate_instance({ProblemFamily::BarycenterOnManifold, 2, 5, 3});
  const Manifold& mf = inst.problem.manifold();
  const Matrix& z = mf.subspace_basis();
  // Gradient at 0 is -2 sum(x_i); it lies in span(Z) when every x_i does.
  const Vector g0 = inst.problem.euclid_gradient(ManifoldPoint(mf, Vector::Zero(5)));
  EXPECT_LE((g0 - z * (z.transpose() * g0)).norm(), 1e-12);
  const Vector xbar = -g0 / (2.0 * kBarycenterPoints);
  EXPECT_NEAR(inst.problem.objective(ManifoldPoint(mf, xbar)), inst.f_star, 1e-10);
  EXPECT_GE(inst.f_star, 0.0);
}

TEST(GenerateInstance, QuadraticIsStronglyConvexOnTheSubspace) {
  const BenchmarkInstance inst = generate_instance({ProblemFamily::StronglyConvexQuadratic, 4, 9, 7});
  const Matrix& z = inst.problem.manifold().subspace_basis();
  const ManifoldPoint origin(inst.problem.manifold(), Vector::Zero(9));
  const Vector b = -inst.problem.euclid_gradient(origin);
  Matrix reduced(4, 4);
  for (int j = 0; j < 4; ++j) {
    const ManifoldPoint e(inst.problem.manifold(), z.col(j));
    reduced.col(j) = z.transpose() * (inst.problem.euclid_gradient(e) + b);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (reduced + reduced.transpose()));
  EXPECT_GE(eig.eigenvalues().minCoeff(), 0.1 - 1e-12);
  EXPECT_LE(eig.eigenvalues().maxCoeff(), 1.0 + 1e-12);
  EXPECT_LE(eig.eigenvalues().maxCoeff(), inst.lipschitz + 1e-12);
  const Vector ystar = reduced.ldlt().solve(z.transpose() * b);
  EXPECT_NEAR(inst.problem.objective(ManifoldPoint(inst.problem.manifold(), z * ystar)), inst.f_star, 1e-10);
}

TEST(GenerateInstance, RayleighOptimumIsTheBlockEigenvalue) {
  const BenchmarkInstance inst = generate_instance({ProblemFamily::RayleighSphere, 3, 7, 5});
  Matrix block(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const ManifoldPoint ei(inst.problem.manifold(), Vector::Unit(7, i));
      block(i, j) = 0.5 * inst.problem.euclid_gradient(ei)[j];
    }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(block);
  EXPECT_NEAR(inst.f_star, eig.eigenvalues()[0], 1e-12);
  Vector v = Vector::Zero(7);
  v.head(4) = eig.eigenvectors().col(0);
  EXPECT_NEAR(inst.problem.objective(ManifoldPoint(inst.problem.manifold(), v)), inst.f_star, 1e-12);
}

TEST(GenerateInstance, DeterministicAndValidated) {
  const ProblemSpec s{ProblemFamily::StronglyConvexQuadratic, 2, 4, 99};
  const BenchmarkInstance a = generate_instance(s), b = generate_instance(s);
  EXPECT_EQ(a.problem.x0.coords(), b.problem.x0.coords());
  EXPECT_EQ(a.f_star, b.f_star);
  EXPECT_THROW(generate_instance({ProblemFamily::RayleighSphere, 3, 3, 0}), InvalidArgument);
  EXPECT_THROW(generate_instance({ProblemFamily::BarycenterAmbient, 3, 2, 0}), InvalidArgument);
}

TEST(RunGrid, SmokeCountsAndInvariants) {
  GridConfig cfg;
  cfg.m_list = {2};
  cfg.codims = {0, 2};
  cfg.instances_per_cell = 5;
  cfg.budget_factor = 20;
  cfg.base_seed = 3;
  const std::vector<BenchRecord> records = run_grid(cfg);
  EXPECT_EQ(records.size(), static_cast<std::size_t>(2 * 4 * 5 * 6 - 5 * 6));
  for (const BenchRecord& r : records) {
    EXPECT_FALSE(r.error.has_value());
    EXPECT_LE(r.final_f, r.f0);
    EXPECT_LE(r.evals, 20 * 3);
    ASSERT_FALSE(r.history.empty());
    EXPECT_EQ(r.history.front(), std::make_pair(0L, r.f0));
    for (std::size_t i = 1; i < r.history.size(); ++i) {
      EXPECT_GE(r.history[i].first, r.history[i - 1].first);
      EXPECT_LE(r.history[i].second, r.history[i - 1].second);
    }
    EXPECT_GE(r.final_f, *r.f_star_analytic - 1e-10 * std::max(1.0, std::abs(*r.f_star_analytic)));
  }
}

TEST(RunGrid, DeterministicAcrossThreadCounts) {
  GridConfig cfg;
  cfg.m_list = {2, 3};
  cfg.codims = {1};
  cfg.instances_per_cell = 3;
  cfg.budget_factor = 10;
  cfg.base_seed = 8;
  const std::string one = records_to_ndjson(run_grid(cfg));
  cfg.threads = 3;
  EXPECT_EQ(records_to_ndjson(run_grid(cfg)), one);
  cfg.base_seed = 9;
  EXPECT_NE(records_to_ndjson(run_grid(cfg)), one);
}

TEST(RunGrid, InstancesIgnoreTheSolverList) {
  GridConfig cfg;
  cfg.m_list = {2};
  cfg.codims = {2};
  cfg.instances_per_cell = 2;
  cfg.budget_factor = 5;
  const auto all = run_grid(cfg);
  cfg.solvers = {cfg.solvers.back()};
  const auto one = run_grid(cfg);
  for (const BenchRecord& r : one) {
    const auto it = std::find_if(all.begin(), all.end(), [&](const BenchRecord& q) {
      return q.spec == r.spec && q.solver_id == r.solver_id;
    });
    ASSERT_NE(it, all.end());
    EXPECT_EQ(it->history, r.history);
  }
}

TEST(RunGrid, ConfigValidation) {
  GridConfig cfg;
  cfg.m_list = {};
  EXPECT_THROW(run_grid(cfg), InvalidArgument);
  cfg = GridConfig{};
  cfg.budget_factor = 0;
  EXPECT_THROW(run_grid(cfg), InvalidArgument);
}

TEST(EvaluationsToTolerance, Rules) {
  const BenchRecord r = synthetic("a", PollingStyle::Intrinsic, 1, 0.0, {{0, 10.0}, {4, 5.0}, {9, 0.05}});
  EXPECT_EQ(evaluations_to_tolerance(r, 0.0, 1e-2), 9);
  EXPECT_EQ(evaluations_to_tolerance(r, 0.0, 0.5), 4);
  EXPECT_FALSE(evaluations_to_tolerance(r, -1.0, 1e-2).has_value());
  EXPECT_EQ(evaluations_to_tolerance(r, 10.0, 1e-2), 0);
}

TEST(DataProfile, SingleSolverStep) {
  const int m = 2;
  const BenchRecord r = synthetic("s", PollingStyle::Intrinsic, 1, 0.0, {{0, 1.0}, {3 * (m + 1), 0.0}}, m);
  const DataProfile p = data_profile({r}, 1e-2, 10);
  ASSERT_EQ(p.alphas.size(), 11u);
  const auto& c = p.curves.at("s");
  for (int a = 0; a <= 10; ++a) EXPECT_EQ(c[a], a < 3 ? 0.0 : 1.0);
}

TEST(DataProfile, NeverSolvedIsFlat) {
  BenchRecord good = synthetic("good", PollingStyle::Intrinsic, 1, 0.0, {{0, 1.0}, {6, 0.0}});
  BenchRecord bad = synthetic("bad", PollingStyle::Projected, 1, 0.9, {{0, 1.0}, {6, 0.9}});
  const DataProfile p = data_profile({good, bad});
  for (double v : p.curves.at("bad")) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(p.curves.at("good").back(), 1.0);
}

TEST(DataProfile, ZeroDenominatorSolvedAtZero) {
  BenchRecord r = synthetic("s", PollingStyle::Intrinsic, 1, 1.0, {{0, 1.0}});
  r.f_star_analytic = 1.0;
  EXPECT_EQ(data_profile({r}).curves.at("s").front(), 1.0);
}

TEST(DataProfile, AnalyticOptimumIsUsedWhenSmaller) {
  BenchRecord r = synthetic("s", PollingStyle::Intrinsic, 1, 0.5, {{0, 1.0}, {6, 0.5}});
  EXPECT_EQ(data_profile({r}).curves.at("s").back(), 1.0);
  r.f_star_analytic = 0.0;
  EXPECT_EQ(data_profile({r}).curves.at("s").back(), 0.0);
  r.f_star_analytic = 0.6;
  const DataProfile p = data_profile({r});
  EXPECT_EQ(p.proxy_violations, 1);
}

TEST(DataProfile, DominanceAndShape) {
  Rng rng(51);
  std::vector<BenchRecord> recs;
  for (std::uint64_t i = 0; i < 40; ++i) {
    const long fast = 1 + static_cast<long>(rng() % 200);
    const long slow = fast + static_cast<long>(rng() % 100);
    recs.push_back(synthetic("fast", PollingStyle::Intrinsic, i, 0.0, {{0, 1.0}, {fast, 0.0}}));
    recs.push_back(synthetic("slow", PollingStyle::Projected, i, 0.0, {{0, 1.0}, {slow, 0.0}}));
  }
  const DataProfile p = data_profile(recs);
  EXPECT_EQ(p.problem_count, 40);
  const auto& f = p.curves.at("fast");
  const auto& s = p.curves.at("slow");
  for (std::size_t a = 0; a < f.size(); ++a) {
    EXPECT_GE(f[a], s[a]);
    EXPECT_GE(f[a], 0.0);
    EXPECT_LE(f[a], 1.0);
    if (a > 0) {
      EXPECT_GE(f[a], f[a - 1]);
      EXPECT_GE(s[a], s[a - 1]);
    }
  }
}

TEST(DataProfiles, OnePanelPerCell) {
  std::vector<BenchRecord> recs;
  recs.push_back(synthetic("a", PollingStyle::Intrinsic, 1, 0.0, {{0, 1.0}, {3, 0.0}}, 2));
  recs.push_back(synthetic("a", PollingStyle::Intrinsic, 2, 0.0, {{0, 1.0}, {3, 0.0}}, 3));
  const auto panels = data_profiles(recs);
  ASSERT_EQ(panels.size(), 2u);
  EXPECT_TRUE(panels.contains({2, 2}));
  EXPECT_TRUE(panels.contains({3, 2}));
}

TEST(HeadToHead, StrictWinsAndPairing) {
  std::vector<BenchRecord> recs;
  for (std::uint64_t i = 0; i < 4; ++i) {
    recs.push_back(synthetic("i", PollingStyle::Intrinsic, i, 1.0, {{0, 2.0}}));
    recs.push_back(synthetic("p", PollingStyle::Projected, i, i < 3 ? 1.5 : 1.0, {{0, 2.0}}));
  }
  recs.push_back(synthetic("p", PollingStyle::Projected, 99, 1.0, {{0, 2.0}}));
  const HeadToHeadTable t = head_to_head(recs);
  const HeadToHeadCell& all = t.cells.at({"all", 2, 2, PssGenerator::PlusMinus, true});
  EXPECT_EQ(all.pairs, 4);
  EXPECT_EQ(all.wins, 3);
  EXPECT_DOUBLE_EQ(*all.fraction(), 0.75);
  EXPECT_EQ(t.cells.at({"strongly_convex_quadratic", 2, 2, PssGenerator::PlusMinus, true}).wins, 3);
  EXPECT_EQ(t.unpaired, 1);
  EXPECT_FALSE(HeadToHeadCell{}.fraction().has_value());
}

TEST(HeadToHead, IdenticalValuesNeverWin) {
  std::vector<BenchRecord> recs;
  for (std::uint64_t i = 0; i < 3; ++i) {
    recs.push_back(synthetic("i", PollingStyle::Intrinsic, i, 1.0, {{0, 2.0}}));
    recs.push_back(synthetic("p", PollingStyle::Projected, i, 1.0, {{0, 2.0}}));
  }
  EXPECT_EQ(*head_to_head(recs).cells.at({"all", 2, 2, PssGenerator::PlusMinus, true}).fraction(), 0.0);
}

TEST(HeadToHead, IntrinsicAlwaysLower) {
  std::vector<BenchRecord> recs;
  for (std::uint64_t i = 0; i < 3; ++i) {
    recs.push_back(synthetic("i", PollingStyle::Intrinsic, i, 0.0, {{0, 2.0}}));
    recs.push_back(synthetic("p", PollingStyle::Projected, i, 1.0, {{0, 2.0}}));
  }
  EXPECT_EQ(*head_to_head(recs).cells.at({"all", 2, 2, PssGenerator::PlusMinus, true}).fraction(), 1.0);
}

TEST(FamilyNames, RoundTrip) {
  for (ProblemFamily f : {ProblemFamily::BarycenterAmbient, ProblemFamily::BarycenterOnManifold,
                          ProblemFamily::StronglyConvexQuadratic, ProblemFamily::RayleighSphere})
    EXPECT_EQ(problem_family_from_string(to_string(f)), f);
  EXPECT_THROW(problem_family_from_string("rosenbrock"), InvalidArgument);
}

}  // namespace
}  // namespace rds
