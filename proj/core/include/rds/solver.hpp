#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "rds/geometry.hpp"
#include "rds/tangent_pss.hpp"

namespace rds {

enum class PollOrder { AsGenerated };

/// Parameters of the direct-search loop. Defaults are the benchmark
/// settings: gamma_dec = 1/2, gamma_inc = 2, alpha_max = 1, c = 1,
/// exponential-map retraction.
struct SolverConfig {
  double alpha0 = 1.0;
  double alpha_max = 1.0;
  double c = 1.0;  // forcing constant of the sufficient decrease test
  double gamma_dec = 0.5;
  double gamma_inc = 2.0;
  long budget = 1000;  // poll evaluations; f(x0) is not charged
  PollingStrategy polling;
  Retraction retraction = Retraction::Exponential;
  PollOrder poll_order = PollOrder::AsGenerated;
  std::uint64_t seed = 0;

  /// Store x_k, grad norm and the polling set's cosine measure per
  /// iteration. Costly; meant for diagnostics and tests.
  bool record_diagnostics = false;
  /// Stop once |grad f(x_k)| <= grad_tol. Unit tests only; needs a gradient.
  std::optional<double> grad_tol;

  void validate() const;
};

struct Problem {
  ManifoldPoint x0;
  std::function<double(const ManifoldPoint&)> objective;
  std::function<Vector(const ManifoldPoint&)> euclid_gradient;  // optional, diagnostics only
  std::optional<double> f_lower;
  std::uint64_t id = 0;

  const Manifold& manifold() const { return x0.manifold(); }
};

struct IterationRecord {
  long k = 0;
  double alpha = 0.0;  // step size used by this iteration
  double f = 0.0;      // f(x_k)
  bool success = false;
  bool truncated = false;  // budget ran out mid-poll; no step-size update
  std::optional<int> accepted_direction;
  int poll_size = 0;
  long evals_used = 0;
  long cumulative_evals = 0;
  std::optional<double> grad_norm;
  std::optional<double> poll_cosine_measure;
  std::optional<Vector> point;
};

enum class StopReason { Budget, GradientTolerance };

struct SolverTrace {
  std::vector<IterationRecord> records;
  Vector final_point;
  double f0 = 0.0;
  double final_f = 0.0;
  double final_alpha = 0.0;
  long evaluations = 0;  // poll evaluations, excludes f(x0)
  long successes = 0;
  StopReason stop_reason = StopReason::Budget;
  /// (cumulative evaluations, f) at x0 and after every accepted step.
  std::vector<std::pair<long, double>> history;
};

/// Riemannian direct search with opportunistic polling: the first
/// direction in generation order that passes
///   f(R_x(alpha d)) < f(x) - (c/2) alpha^2 |d|^2
/// is accepted. NaN objective values count as failed polls.
SolverTrace direct_search(const Problem& problem, const SolverConfig& config);

struct UnsuccessfulBoundCheck {
  long k = 0;
  double lhs = 0.0;  // |grad f(x_k)|
  double rhs = 0.0;  // (L + c) b_max alpha_k / (2 kappa_k) + rounding slack
  bool satisfied = false;
};

/// Checks |grad f(x_k)| <= (L + c) alpha_k / (2 cm_k) at every fully polled
/// unsuccessful iteration, plus 2 delta / (alpha_k cm_k) with
/// delta = 16 eps max(1, |f(x_k)|) for rounding in the sufficient-decrease
/// test. Needs a trace recorded with record_diagnostics.
std::vector<UnsuccessfulBoundCheck> diagnostic_unsuccessful_bound(const SolverTrace& trace, const Problem& problem,
                                                                  double lipschitz, const SolverConfig& config);

/// Sum of alpha_k^2 over the recorded iterations.
double diagnostic_step_square_sum(const SolverTrace& trace);

}  // namespace rds
