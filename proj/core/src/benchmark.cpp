#include "rds/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <Eigen/Eigenvalues>

#include "rds/random.hpp"

namespace rds {

std::string to_string(ProblemFamily f) {
  switch (f) {
    case ProblemFamily::BarycenterAmbient: return "barycenter_ambient";
    case ProblemFamily::BarycenterOnManifold: return "barycenter_on_manifold";
    case ProblemFamily::StronglyConvexQuadratic: return "strongly_convex_quadratic";
    case ProblemFamily::RayleighSphere: return "rayleigh_sphere";
  }
  return "unknown";
}

ProblemFamily problem_family_from_string(const std::string& name) {
  for (ProblemFamily f : {ProblemFamily::BarycenterAmbient, ProblemFamily::BarycenterOnManifold,
                          ProblemFamily::StronglyConvexQuadratic, ProblemFamily::RayleighSphere})
    if (to_string(f) == name) return f;
  throw InvalidArgument("unknown problem family '" + name + "'");
}

void ProblemSpec::validate() const {
  if (m < 1) throw InvalidArgument("problem spec: m must be >= 1");
  if (n < m) throw InvalidArgument("problem spec: n must be >= m");
  if (family == ProblemFamily::RayleighSphere && n < m + 1)
    throw InvalidArgument("problem spec: rayleigh_sphere needs n >= m + 1");
}

namespace {

BenchmarkInstance barycenter(const ProblemSpec& spec, const Manifold& mf, bool on_manifold, Rng& rng) {
  const Matrix& z = mf.subspace_basis();
  Matrix pts = gaussian_matrix(spec.n, kBarycenterPoints, rng);
  if (on_manifold) pts = z * (z.transpose() * pts);
  const Vector sum = pts.rowwise().sum();
  auto f = [pts](const ManifoldPoint& x) { return (pts.colwise() - x.coords()).colwise().squaredNorm().sum(); };
  auto grad = [sum](const ManifoldPoint& x) -> Vector { return 2.0 * (kBarycenterPoints * x.coords() - sum); };
  const Vector xbar = z * (z.transpose() * (sum / kBarycenterPoints));
  BenchmarkInstance inst{spec, Problem{random_point(mf, derive_seed({spec.instance_seed, 3})), f, grad, {}, 0}, 0.0,
                         2.0 * kBarycenterPoints};
  inst.f_star = (pts.colwise() - xbar).colwise().squaredNorm().sum();
  return inst;
}

BenchmarkInstance quadratic(const ProblemSpec& spec, const Manifold& mf, Rng& rng) {
  const Matrix q = haar_orthogonal(spec.n, rng);
  Vector lambda(spec.n);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda[i] = unif(rng);
  const Matrix a = q * lambda.asDiagonal() * q.transpose();
  const Vector b = gaussian_vector(spec.n, rng);
  auto f = [a, b](const ManifoldPoint& x) {
    const Vector& v = x.coords();
    return 0.5 * v.dot(a * v) - b.dot(v);
  };
  auto grad = [a, b](const ManifoldPoint& x) -> Vector { return a * x.coords() - b; };
  const Matrix& z = mf.subspace_basis();
  const Matrix reduced = z.transpose() * a * z;
  const Vector y = reduced.llt().solve(z.transpose() * b);
  const Vector xstar = z * y;
  BenchmarkInstance inst{spec, Problem{random_point(mf, derive_seed({spec.instance_seed, 3})), f, grad, {}, 0}, 0.0,
                         lambda.maxCoeff()};
  inst.f_star = 0.5 * xstar.dot(a * xstar) - b.dot(xstar);
  return inst;
}

BenchmarkInstance rayleigh(const ProblemSpec& spec, const Manifold& mf, Rng& rng) {
  const Matrix g = gaussian_matrix(spec.n, spec.n, rng);
  const Matrix a = 0.5 * (g + g.transpose());
  auto f = [a](const ManifoldPoint& x) { return x.coords().dot(a * x.coords()); };
  auto grad = [a](const ManifoldPoint& x) -> Vector { return 2.0 * (a * x.coords()); };
  const int s = spec.m + 1;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a.topLeftCorner(s, s), Eigen::EigenvaluesOnly);
  const double spectral = eig.eigenvalues().cwiseAbs().maxCoeff();
  BenchmarkInstance inst{spec, Problem{random_point(mf, derive_seed({spec.instance_seed, 3})), f, grad, {}, 0},
                         eig.eigenvalues()[0], 4.0 * spectral};
  return inst;
}

}  // namespace

BenchmarkInstance generate_instance(const ProblemSpec& spec) {
  spec.validate();
  Rng rng(derive_seed({spec.instance_seed, 2}));
  BenchmarkInstance inst = [&] {
    if (spec.family == ProblemFamily::RayleighSphere) return rayleigh(spec, Manifold::embedded_sphere(spec.m, spec.n), rng);
    Rng frame_rng(derive_seed({spec.instance_seed, 1}));
    const Manifold mf = Manifold::subspace(haar_stiefel(spec.n, spec.m, frame_rng));
    switch (spec.family) {
      case ProblemFamily::BarycenterAmbient: return barycenter(spec, mf, false, rng);
      case ProblemFamily::BarycenterOnManifold: return barycenter(spec, mf, true, rng);
      default: return quadratic(spec, mf, rng);
    }
  }();
  inst.problem.id = spec.instance_seed;
  inst.problem.f_lower = inst.f_star;
  return inst;
}

std::vector<PollingStrategy> default_solver_variants(bool rotate) {
  std::vector<PollingStrategy> out;
  for (PollingStyle style : {PollingStyle::Intrinsic, PollingStyle::Projected})
    for (PssGenerator g : {PssGenerator::PlusMinus, PssGenerator::MinimalSum, PssGenerator::UniformAngles})
      out.push_back({style, g, rotate, 0});
  return out;
}

void GridConfig::validate() const {
  if (m_list.empty() || codims.empty() || families.empty() || solvers.empty())
    throw InvalidArgument("grid config: m_list, codims, families and solvers must be non-empty");
  for (int m : m_list)
    if (m < 1) throw InvalidArgument("grid config: every m must be >= 1");
  for (int c : codims)
    if (c < 0) throw InvalidArgument("grid config: codims must be >= 0");
  for (const PollingStrategy& s : solvers)
    if (s.generator == PssGenerator::Custom) throw InvalidArgument("grid config: custom generator is not a solver variant");
  if (budget_factor < 1) throw InvalidArgument("grid config: budget_factor must be >= 1");
  if (instances_per_cell < 1) throw InvalidArgument("grid config: instances_per_cell must be >= 1");
  if (threads < 1) throw InvalidArgument("grid config: threads must be >= 1");
}

std::uint64_t instance_seed(std::uint64_t base_seed, ProblemFamily family, int m, int n, int index) {
  return derive_seed({base_seed, static_cast<std::uint64_t>(family), static_cast<std::uint64_t>(m),
                      static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(index)});
}

namespace {

struct Job {
  ProblemSpec spec;
  int index;
  std::size_t first_record;
};

BenchRecord solve_one(const BenchmarkInstance& inst, int index, const PollingStrategy& strategy,
                      const GridConfig& config) {
  BenchRecord rec;
  rec.spec = inst.spec;
  rec.instance_index = index;
  rec.strategy = strategy;
  rec.solver_id = strategy.id();
  rec.budget = static_cast<long>(config.budget_factor) * (inst.spec.m + 1);
  rec.f_star_analytic = inst.f_star;
  try {
    SolverConfig sc;
    sc.budget = rec.budget;
    sc.polling = strategy;
    sc.seed = derive_seed({config.base_seed, fnv1a(rec.solver_id)});
    const SolverTrace trace = direct_search(inst.problem, sc);
    rec.f0 = trace.f0;
    rec.final_f = trace.final_f;
    rec.evals = trace.evaluations;
    rec.history = trace.history;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<BenchRecord> run_grid(const GridConfig& config) {
  config.validate();
  std::vector<Job> jobs;
  std::size_t total = 0;
  for (int m : config.m_list)
    for (int codim : config.codims)
      for (ProblemFamily fam : config.families) {
        if (fam == ProblemFamily::RayleighSphere && codim == 0) continue;
        for (int i = 0; i < config.instances_per_cell; ++i) {
          const int n = m + codim;
          jobs.push_back({{fam, m, n, instance_seed(config.base_seed, fam, m, n, i)}, i, total});
          total += config.solvers.size();
        }
      }

  std::vector<BenchRecord> records(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      std::optional<BenchmarkInstance> inst;
      std::string failure;
      try {
        inst = generate_instance(job.spec);
      } catch (const std::exception& e) {
        failure = e.what();
      }
      for (std::size_t s = 0; s < config.solvers.size(); ++s) {
        BenchRecord& rec = records[job.first_record + s];
        if (inst) {
          rec = solve_one(*inst, job.index, config.solvers[s], config);
        } else {
          rec.spec = job.spec;
          rec.instance_index = job.index;
          rec.strategy = config.solvers[s];
          rec.solver_id = config.solvers[s].id();
          rec.error = failure;
        }
      }
    }
  };
  const int nthreads = std::min<int>(config.threads, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return records;
}

std::optional<long> evaluations_to_tolerance(const BenchRecord& record, double f_star, double tau) {
  if (record.error || record.history.empty()) return std::nullopt;
  const double denom = record.f0 - f_star;
  if (!(denom > 0.0)) return 0;
  for (const auto& [evals, f] : record.history)
    if (f - f_star <= tau * denom) return evals;
  return std::nullopt;
}

namespace {

using ProblemKey = std::tuple<int, int, int, std::uint64_t>;  // family, m, n, instance seed

ProblemKey problem_key(const BenchRecord& r) {
  return {static_cast<int>(r.spec.family), r.spec.m, r.spec.n, r.spec.instance_seed};
}

}  // namespace

DataProfile data_profile(const std::vector<BenchRecord>& records, double tau, int alpha_max) {
  if (!(tau > 0.0)) throw InvalidArgument("data_profile: tau must be positive");
  if (alpha_max < 0) throw InvalidArgument("data_profile: alpha_max must be >= 0");
  DataProfile prof;
  prof.tau = tau;
  for (int a = 0; a <= alpha_max; ++a) prof.alphas.push_back(a);
  if (records.empty()) return prof;
  prof.m = records.front().spec.m;
  prof.codim = records.front().codim();

  std::map<ProblemKey, std::vector<const BenchRecord*>> problems;
  std::vector<std::string> solvers;
  for (const BenchRecord& r : records) {
    problems[problem_key(r)].push_back(&r);
    if (std::find(solvers.begin(), solvers.end(), r.solver_id) == solvers.end()) solvers.push_back(r.solver_id);
  }
  prof.problem_count = static_cast<int>(problems.size());
  for (const std::string& s : solvers) prof.curves[s].assign(prof.alphas.size(), 0.0);

  for (const auto& [key, recs] : problems) {
    double best = std::numeric_limits<double>::infinity();
    std::optional<double> analytic;
    for (const BenchRecord* r : recs) {
      if (!r->error) best = std::min(best, r->final_f);
      if (r->f_star_analytic) analytic = *r->f_star_analytic;
    }
    if (analytic) {
      if (best < *analytic - 1e-12 * std::max(1.0, std::abs(*analytic))) ++prof.proxy_violations;
      best = std::min(best, *analytic);
    }
    for (const BenchRecord* r : recs) {
      const std::optional<long> t = evaluations_to_tolerance(*r, best, tau);
      if (!t) continue;
      std::vector<double>& curve = prof.curves[r->solver_id];
      for (std::size_t a = 0; a < prof.alphas.size(); ++a)
        if (static_cast<double>(*t) <= prof.alphas[a] * (r->spec.m + 1)) curve[a] += 1.0;
    }
  }
  for (auto& [id, curve] : prof.curves)
    for (double& v : curve) v /= prof.problem_count;
  return prof;
}

std::map<std::pair<int, int>, DataProfile> data_profiles(const std::vector<BenchRecord>& records, double tau,
                                                         int alpha_max) {
  std::map<std::pair<int, int>, std::vector<BenchRecord>> panels;
  for (const BenchRecord& r : records) panels[{r.spec.m, r.codim()}].push_back(r);
  std::map<std::pair<int, int>, DataProfile> out;
  for (const auto& [key, recs] : panels) out[key] = data_profile(recs, tau, alpha_max);
  return out;
}

HeadToHeadTable head_to_head(const std::vector<BenchRecord>& records) {
  using PairKey = std::tuple<ProblemKey, int, bool>;  // problem, generator, rotate
  std::map<PairKey, std::vector<const BenchRecord*>> intrinsic, projected;
  for (const BenchRecord& r : records) {
    const PairKey key{problem_key(r), static_cast<int>(r.strategy.generator), r.strategy.rotate};
    (r.strategy.style == PollingStyle::Intrinsic ? intrinsic : projected)[key].push_back(&r);
  }
  HeadToHeadTable table;
  for (const auto& [key, ins] : intrinsic) {
    const auto it = projected.find(key);
    if (it == projected.end() || ins.size() != 1 || it->second.size() != 1 || ins[0]->error || it->second[0]->error) {
      table.unpaired += static_cast<int>(ins.size());
      continue;
    }
    const BenchRecord& a = *ins[0];
    const BenchRecord& b = *it->second[0];
    const bool win = a.final_f < b.final_f;
    for (const std::string& fam : {to_string(a.spec.family), std::string("all")}) {
      HeadToHeadCell& cell = table.cells[{fam, a.spec.m, a.codim(), a.strategy.generator, a.strategy.rotate}];
      ++cell.pairs;
      if (win) ++cell.wins;
    }
  }
  for (const auto& [key, proj] : projected)
    if (!intrinsic.contains(key)) table.unpaired += static_cast<int>(proj.size());
  return table;
}

}  // namespace rds
