#include "rds/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rds/random.hpp"

namespace rds {

void SolverConfig::validate() const {
  if (!(alpha0 > 0.0)) throw InvalidArgument("solver: alpha0 must be > 0");
  if (!(alpha_max > 0.0)) throw InvalidArgument("solver: alpha_max must be > 0");
  if (alpha0 > alpha_max) throw InvalidArgument("solver: alpha0 must not exceed alpha_max");
  if (!(c > 0.0)) throw InvalidArgument("solver: c must be > 0");
  if (!(gamma_dec > 0.0 && gamma_dec < 1.0)) throw InvalidArgument("solver: gamma_dec must lie in (0, 1)");
  if (!(gamma_inc > 1.0)) throw InvalidArgument("solver: gamma_inc must be > 1");
  if (budget < 1) throw InvalidArgument("solver: budget must be >= 1");
  if (grad_tol && !(*grad_tol >= 0.0)) throw InvalidArgument("solver: grad_tol must be >= 0");
}

SolverTrace direct_search(const Problem& problem, const SolverConfig& config) {
  config.validate();
  if (!problem.objective) throw InvalidArgument("direct_search: problem has no objective");
  if (config.grad_tol && !problem.euclid_gradient)
    throw InvalidArgument("direct_search: grad_tol requires a gradient");

  const bool want_grad = problem.euclid_gradient && (config.record_diagnostics || config.grad_tol);

  ManifoldPoint x = problem.x0;
  double f = problem.objective(x);
  double alpha = config.alpha0;
  long cumulative = 0;

  SolverTrace trace;
  trace.f0 = f;
  trace.history.emplace_back(0, f);

  for (long k = 0; cumulative < config.budget; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.alpha = alpha;
    rec.f = f;
    if (want_grad) rec.grad_norm = riemannian_gradient(x, problem.euclid_gradient(x)).norm();
    if (config.grad_tol && rec.grad_norm && *rec.grad_norm <= *config.grad_tol) {
      trace.stop_reason = StopReason::GradientTolerance;
      break;
    }

    const TangentPollingSet poll =
        make_polling_set(config.polling, x, derive_seed({config.seed, problem.id, static_cast<std::uint64_t>(k)}));
    rec.poll_size = poll.cardinality();
    if (config.record_diagnostics) {
      rec.point = x.coords();
      try {
        rec.poll_cosine_measure = tangent_cosine_measure(poll, tangent_basis(x, BasisMode::canonical())).cosine_measure;
      } catch (const BudgetExceeded&) {
      }
    }

    for (int i = 0; i < poll.cardinality(); ++i) {
      if (cumulative >= config.budget) {
        rec.truncated = true;
        break;
      }
      const Vector d = poll.directions.col(i);
      const double dnorm2 = d.squaredNorm();
      ManifoldPoint trial = retract(TangentVector(x, alpha * d), config.retraction);
      const double ft = problem.objective(trial);
      ++cumulative;
      ++rec.evals_used;
      if (ft < f - 0.5 * config.c * alpha * alpha * dnorm2) {
        rec.success = true;
        rec.accepted_direction = i;
        x = std::move(trial);
        f = ft;
        break;
      }
    }
    rec.cumulative_evals = cumulative;

    if (rec.success) {
      alpha = std::min(config.gamma_inc * alpha, config.alpha_max);
      ++trace.successes;
      trace.history.emplace_back(cumulative, f);
    } else if (!rec.truncated) {
      alpha = config.gamma_dec * alpha;
    }
    const bool stop = rec.truncated;
    trace.records.push_back(std::move(rec));
    if (stop) break;
  }

  trace.final_point = x.coords();
  trace.final_f = f;
  trace.final_alpha = alpha;
  trace.evaluations = cumulative;
  return trace;
}

std::vector<UnsuccessfulBoundCheck> diagnostic_unsuccessful_bound(const SolverTrace& trace, const Problem& problem,
                                                                  double lipschitz, const SolverConfig& config) {
  if (!problem.euclid_gradient) throw InvalidArgument("diagnostic_unsuccessful_bound: problem has no gradient");
  std::vector<UnsuccessfulBoundCheck> out;
  for (const IterationRecord& rec : trace.records) {
    if (rec.success || rec.truncated) continue;
    if (!rec.point) throw InvalidArgument("diagnostic_unsuccessful_bound: trace lacks recorded points");
    if (!rec.poll_cosine_measure) continue;
    const ManifoldPoint x(problem.manifold(), *rec.point);
    UnsuccessfulBoundCheck check;
    check.k = rec.k;
    check.lhs = riemannian_gradient(x, problem.euclid_gradient(x)).norm();
    const double kappa = *rec.poll_cosine_measure;
    // Rounding in f(x_k) and f(R(alpha d)) adds 2 delta / (alpha kappa).
    const double delta = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(rec.f));
    check.rhs = kappa > 0.0 ? (lipschitz + config.c) * rec.alpha / (2.0 * kappa) + 2.0 * delta / (rec.alpha * kappa)
                            : std::numeric_limits<double>::infinity();
    check.satisfied = check.lhs <= check.rhs * (1.0 + 1e-12) + 1e-15;
    out.push_back(check);
  }
  return out;
}

double diagnostic_step_square_sum(const SolverTrace& trace) {
  double sum = 0.0;
  for (const IterationRecord& rec : trace.records) sum += rec.alpha * rec.alpha;
  return sum;
}

}  // namespace rds
