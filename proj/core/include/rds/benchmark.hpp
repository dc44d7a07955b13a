#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rds/solver.hpp"
#include "rds/tangent_pss.hpp"

namespace rds {

enum class ProblemFamily { BarycenterAmbient, BarycenterOnManifold, StronglyConvexQuadratic, RayleighSphere };

std::string to_string(ProblemFamily f);
ProblemFamily problem_family_from_string(const std::string& name);

/// One benchmark instance. The subspace families live on span(Z) with Z a
/// Haar n x m frame; RayleighSphere lives on embedded_sphere(m, n).
struct ProblemSpec {
  ProblemFamily family = ProblemFamily::BarycenterAmbient;
  int m = 2;
  int n = 2;
  std::uint64_t instance_seed = 0;

  void validate() const;
  bool operator==(const ProblemSpec&) const = default;
};

struct BenchmarkInstance {
  ProblemSpec spec;
  Problem problem;
  double f_star = 0.0;     // analytic optimal value
  double lipschitz = 0.0;  // Lipschitz constant of the Riemannian gradient
};

inline constexpr int kBarycenterPoints = 10;

/// Builds the objective, gradient, x0 and analytic optimum of an instance.
/// Fully determined by spec.instance_seed.
BenchmarkInstance generate_instance(const ProblemSpec& spec);

struct BenchRecord {
  ProblemSpec spec;
  int instance_index = 0;
  std::string solver_id;
  PollingStrategy strategy;
  long budget = 0;
  double f0 = 0.0;
  double final_f = 0.0;
  std::optional<double> f_star_analytic;
  long evals = 0;
  /// (cumulative evaluations, best f so far), starting at (0, f0).
  std::vector<std::pair<long, double>> history;
  std::optional<std::string> error;

  int codim() const { return spec.n - spec.m; }
};

/// The six polling variants {intrinsic, projected} x {plus_minus,
/// minimal_sum, uniform_angles} with the given rotation switch.
std::vector<PollingStrategy> default_solver_variants(bool rotate);

struct GridConfig {
  std::vector<int> m_list{2, 4, 8, 16, 32};
  std::vector<int> codims{0, 2, 4, 8, 16, 32};
  std::vector<ProblemFamily> families{ProblemFamily::BarycenterAmbient, ProblemFamily::BarycenterOnManifold,
                                      ProblemFamily::StronglyConvexQuadratic, ProblemFamily::RayleighSphere};
  std::vector<PollingStrategy> solvers = default_solver_variants(true);
  int budget_factor = 100;
  int instances_per_cell = 100;
  std::uint64_t base_seed = 0;
  int threads = 1;

  void validate() const;
};

std::uint64_t instance_seed(std::uint64_t base_seed, ProblemFamily family, int m, int n, int index);

/// Solves every (instance, solver) pair with budget budget_factor (m + 1).
/// Output order is (m, codim, family, index, solver) regardless of the
/// thread count. A failing solve yields a record with `error` set.
std::vector<BenchRecord> run_grid(const GridConfig& config);

struct DataProfile {
  int m = 0;
  int codim = 0;
  double tau = 1e-2;
  std::vector<double> alphas;
  std::map<std::string, std::vector<double>> curves;
  int problem_count = 0;
  /// Problems where the best observed value undercuts the analytic optimum
  /// beyond roundoff.
  int proxy_violations = 0;
};

/// Evaluations needed to satisfy (f - f*) <= tau (f0 - f*); nullopt if
/// never. A zero denominator counts as solved at 0.
std::optional<long> evaluations_to_tolerance(const BenchRecord& record, double f_star, double tau);

/// Data profile over all records (treated as one panel). Per problem, f* is
/// the best final value across solvers, replaced by the analytic optimum
/// when that is smaller. alphas = 0, 1, ..., alpha_max.
DataProfile data_profile(const std::vector<BenchRecord>& records, double tau = 1e-2, int alpha_max = 100);

/// One profile per (m, codim) panel.
std::map<std::pair<int, int>, DataProfile> data_profiles(const std::vector<BenchRecord>& records, double tau = 1e-2,
                                                         int alpha_max = 100);

struct HeadToHeadKey {
  std::string family;  // "all" for the pooled table
  int m = 0;
  int codim = 0;
  PssGenerator generator = PssGenerator::PlusMinus;
  bool rotate = false;

  auto tie() const { return std::tie(family, m, codim, generator, rotate); }
  bool operator<(const HeadToHeadKey& o) const { return tie() < o.tie(); }
};

struct HeadToHeadCell {
  int wins = 0;  // final_f(intrinsic) < final_f(projected)
  int pairs = 0;

  std::optional<double> fraction() const {
    if (pairs == 0) return std::nullopt;
    return static_cast<double>(wins) / pairs;
  }
};

struct HeadToHeadTable {
  std::map<HeadToHeadKey, HeadToHeadCell> cells;
  int unpaired = 0;
};

/// Pairs intrinsic and projected records of the same instance, generator
/// and rotation switch. Cells exist per family and pooled under "all".
HeadToHeadTable head_to_head(const std::vector<BenchRecord>& records);

}  // namespace rds
