#include "rds/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "rds/random.hpp"

namespace rds {
namespace {

std::string join(const std::string& field, const std::string& key) {
  return field.empty() ? key : field + "." + key;
}

std::string indexed(const std::string& field, std::size_t i) { return field + "[" + std::to_string(i) + "]"; }

/// Strict accessor for one JSON object: typed lookups with field paths and
/// rejection of unknown keys.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string field) : j_(j), field_(std::move(field)) {
    if (!j_.is_object()) throw ConfigError(field_.empty() ? "<root>" : field_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const Json& at(const std::string& key) {
    if (!has(key)) throw ConfigError(join(field_, key), "missing required field");
    return j_.at(key);
  }

  std::string path(const std::string& key) const { return join(field_, key); }

  long integer(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    return v.get<long>();
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const Json& v = at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long>() >= 0) return static_cast<std::uint64_t>(v.get<long>());
    throw ConfigError(path(key), "expected a non-negative integer");
  }

  double number(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path(key), "expected a finite number");
    return d;
  }

  bool boolean(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<int> int_list(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected a list of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) throw ConfigError(indexed(path(key), i), "expected an integer");
      out.push_back(v[i].get<int>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.contains(it.key())) throw ConfigError(join(field_, it.key()), "unknown field");
  }

 private:
  const Json& j_;
  std::string field_;
  std::set<std::string> seen_;
};

template <typename Fn>
auto wrap_enum(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty list of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(indexed(field, i), "expected a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json columns_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(vector_to_json(m.col(c)));
  return out;
}

Matrix columns_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty list of vectors");
  const Vector first = vector_from_json(j[0], indexed(field, 0));
  Matrix m(first.size(), static_cast<Eigen::Index>(j.size()));
  m.col(0) = first;
  for (std::size_t c = 1; c < j.size(); ++c) {
    const Vector col = vector_from_json(j[c], indexed(field, c));
    if (col.size() != first.size()) throw ConfigError(indexed(field, c), "vector length differs from the first");
    m.col(static_cast<Eigen::Index>(c)) = col;
  }
  return m;
}

Json manifold_to_json(const Manifold& mf) {
  switch (mf.kind()) {
    case ManifoldKind::UnitSphere: return Json{{"kind", "unit_sphere"}, {"n", mf.ambient_dim()}};
    case ManifoldKind::EmbeddedSphere:
      return Json{{"kind", "embedded_sphere"}, {"m", mf.dim()}, {"n", mf.ambient_dim()}};
    case ManifoldKind::Subspace: return Json{{"kind", "subspace"}, {"Z", columns_to_json(mf.subspace_basis())}};
  }
  return Json();
}

Manifold manifold_from_json(const Json& j, const std::string& field) {
  ObjectReader r(j, field);
  const std::string kind = r.string("kind");
  auto build = [&]() -> Manifold {
    if (kind == "unit_sphere") return Manifold::unit_sphere(static_cast<int>(r.integer("n")));
    if (kind == "embedded_sphere")
      return Manifold::embedded_sphere(static_cast<int>(r.integer("m")), static_cast<int>(r.integer("n")));
    if (kind == "subspace") return Manifold::subspace(columns_from_json(r.at("Z"), r.path("Z")));
    throw ConfigError(r.path("kind"), "expected unit_sphere, embedded_sphere or subspace");
  };
  Manifold mf = wrap_enum(field.empty() ? "<root>" : field, build);
  r.finish();
  return mf;
}

Json pss_spec_to_json(const EuclideanPss& pss, std::optional<std::uint64_t> rotation_seed) {
  if (pss.generator == PssGenerator::Custom)
    return Json{{"generator", "custom"}, {"directions", columns_to_json(pss.directions)}};
  Json out{{"generator", to_string(pss.generator)}, {"m", pss.dim}};
  if (rotation_seed) out["rotation_seed"] = *rotation_seed;
  return out;
}

EuclideanPss pss_from_json(const Json& j, const std::string& field) {
  ObjectReader r(j, field);
  if (r.has("directions")) {
    if (r.has("generator") && r.string("generator") != "custom")
      throw ConfigError(r.path("generator"), "explicit directions require generator 'custom'");
    Matrix d = columns_from_json(r.at("directions"), r.path("directions"));
    r.finish();
    return wrap_enum(r.path("directions"), [&] { return custom_pss(std::move(d)); });
  }
  const PssGenerator g = wrap_enum(r.path("generator"), [&] { return pss_generator_from_string(r.string("generator")); });
  if (g == PssGenerator::Custom) throw ConfigError(r.path("generator"), "custom sets need a 'directions' field");
  const long m = r.integer("m");
  if (m < 1 || m > 1024) throw ConfigError(r.path("m"), "expected 1 <= m <= 1024");
  Matrix basis = Matrix::Identity(m, m);
  if (r.has("rotation_seed")) basis = random_rotation(static_cast<int>(m), r.unsigned_integer("rotation_seed"));
  r.finish();
  return make_pss(g, basis);
}

Json strategy_to_json(const PollingStrategy& s) {
  return Json{{"style", to_string(s.style)}, {"generator", to_string(s.generator)}, {"rotate", s.rotate}, {"seed", s.seed}};
}

PollingStrategy strategy_from_json(const Json& j, const std::string& field) {
  ObjectReader r(j, field);
  PollingStrategy s;
  if (r.has("style")) s.style = wrap_enum(r.path("style"), [&] { return polling_style_from_string(r.string("style")); });
  if (r.has("generator"))
    s.generator = wrap_enum(r.path("generator"), [&] { return pss_generator_from_string(r.string("generator")); });
  if (s.generator == PssGenerator::Custom) throw ConfigError(r.path("generator"), "custom generator cannot poll");
  if (r.has("rotate")) s.rotate = r.boolean("rotate");
  if (r.has("seed")) s.seed = r.unsigned_integer("seed");
  r.finish();
  return s;
}

Json solver_config_to_json(const SolverConfig& c) {
  Json out{{"alpha0", c.alpha0},
           {"alpha_max", c.alpha_max},
           {"c", c.c},
           {"gamma_dec", c.gamma_dec},
           {"gamma_inc", c.gamma_inc},
           {"budget", c.budget},
           {"polling", strategy_to_json(c.polling)},
           {"retraction", c.retraction == Retraction::Exponential ? "exponential" : "metric"},
           {"seed", c.seed},
           {"record_diagnostics", c.record_diagnostics}};
  if (c.grad_tol) out["grad_tol"] = *c.grad_tol;
  return out;
}

SolverConfig solver_config_from_json(const Json& j, const std::string& field) {
  ObjectReader r(j, field);
  SolverConfig c;
  if (r.has("alpha0")) c.alpha0 = r.number("alpha0");
  if (r.has("alpha_max")) c.alpha_max = r.number("alpha_max");
  if (r.has("c")) c.c = r.number("c");
  if (r.has("gamma_dec")) c.gamma_dec = r.number("gamma_dec");
  if (r.has("gamma_inc")) c.gamma_inc = r.number("gamma_inc");
  if (r.has("budget")) c.budget = r.integer("budget");
  if (r.has("polling")) c.polling = strategy_from_json(r.at("polling"), r.path("polling"));
  if (r.has("retraction")) {
    const std::string s = r.string("retraction");
    if (s == "exponential") c.retraction = Retraction::Exponential;
    else if (s == "metric") c.retraction = Retraction::Metric;
    else throw ConfigError(r.path("retraction"), "expected exponential or metric");
  }
  if (r.has("seed")) c.seed = r.unsigned_integer("seed");
  if (r.has("record_diagnostics")) c.record_diagnostics = r.boolean("record_diagnostics");
  if (r.has("grad_tol")) c.grad_tol = r.number("grad_tol");
  r.finish();
  wrap_enum(field.empty() ? "<root>" : field, [&] {
    c.validate();
    return 0;
  });
  return c;
}

Json problem_spec_to_json(const ProblemSpec& s) {
  return Json{{"family", to_string(s.family)}, {"m", s.m}, {"n", s.n}, {"instance_seed", s.instance_seed}};
}

ProblemSpec problem_spec_from_json(const Json& j, const std::string& field) {
  ObjectReader r(j, field);
  ProblemSpec s;
  s.family = wrap_enum(r.path("family"), [&] { return problem_family_from_string(r.string("family")); });
  s.m = static_cast<int>(r.integer("m"));
  s.n = static_cast<int>(r.integer("n"));
  s.instance_seed = r.has("instance_seed") ? r.unsigned_integer("instance_seed") : 0;
  r.finish();
  wrap_enum(field.empty() ? "<root>" : field, [&] {
    s.validate();
    return 0;
  });
  return s;
}

Json grid_config_to_json(const GridConfig& c) {
  Json fams = Json::array();
  for (ProblemFamily f : c.families) fams.push_back(to_string(f));
  Json solvers = Json::array();
  for (const PollingStrategy& s : c.solvers) solvers.push_back(strategy_to_json(s));
  return Json{{"m_list", c.m_list},
              {"codims", c.codims},
              {"families", fams},
              {"solvers", solvers},
              {"budget_factor", c.budget_factor},
              {"instances_per_cell", c.instances_per_cell},
              {"base_seed", c.base_seed}};
}

GridConfig grid_config_from_json(const Json& j, const std::string& field) {
  ObjectReader r(j, field);
  GridConfig c;
  if (r.has("m_list")) c.m_list = r.int_list("m_list");
  if (r.has("codims")) c.codims = r.int_list("codims");
  if (r.has("families")) {
    const Json& fams = r.at("families");
    if (!fams.is_array()) throw ConfigError(r.path("families"), "expected a list of family names");
    c.families.clear();
    for (std::size_t i = 0; i < fams.size(); ++i) {
      const std::string f = indexed(r.path("families"), i);
      if (!fams[i].is_string()) throw ConfigError(f, "expected a string");
      c.families.push_back(wrap_enum(f, [&] { return problem_family_from_string(fams[i].get<std::string>()); }));
    }
  }
  if (r.has("rotate")) c.solvers = default_solver_variants(r.boolean("rotate"));
  if (r.has("solvers")) {
    const Json& sv = r.at("solvers");
    if (!sv.is_array()) throw ConfigError(r.path("solvers"), "expected a list of polling strategies");
    c.solvers.clear();
    for (std::size_t i = 0; i < sv.size(); ++i) c.solvers.push_back(strategy_from_json(sv[i], indexed(r.path("solvers"), i)));
  }
  if (r.has("budget_factor")) c.budget_factor = static_cast<int>(r.integer("budget_factor"));
  if (r.has("instances_per_cell")) c.instances_per_cell = static_cast<int>(r.integer("instances_per_cell"));
  if (r.has("base_seed")) c.base_seed = r.unsigned_integer("base_seed");
  r.finish();
  wrap_enum(field.empty() ? "<root>" : field, [&] {
    c.validate();
    return 0;
  });
  return c;
}

Json iteration_to_json(const IterationRecord& r) {
  Json out{{"k", r.k},
           {"alpha", r.alpha},
           {"f", r.f},
           {"success", r.success},
           {"truncated", r.truncated},
           {"accepted_direction", r.accepted_direction ? Json(*r.accepted_direction) : Json()},
           {"poll_size", r.poll_size},
           {"evals_used", r.evals_used},
           {"cumulative_evals", r.cumulative_evals}};
  if (r.grad_norm) out["grad_norm"] = *r.grad_norm;
  if (r.poll_cosine_measure) out["poll_cosine_measure"] = *r.poll_cosine_measure;
  if (r.point) out["point"] = vector_to_json(*r.point);
  return out;
}

Json trace_to_json(const SolverTrace& t) {
  Json iters = Json::array();
  for (const IterationRecord& r : t.records) iters.push_back(iteration_to_json(r));
  Json hist = Json::array();
  for (const auto& [e, f] : t.history) hist.push_back(Json::array({e, f}));
  return Json{{"f0", t.f0},
              {"final_f", t.final_f},
              {"final_alpha", t.final_alpha},
              {"evaluations", t.evaluations},
              {"successes", t.successes},
              {"stop_reason", t.stop_reason == StopReason::Budget ? "budget" : "gradient_tolerance"},
              {"final_point", vector_to_json(t.final_point)},
              {"history", hist},
              {"iterations", iters}};
}

Json bench_record_to_json(const BenchRecord& r) {
  Json hist = Json::array();
  for (const auto& [e, f] : r.history) hist.push_back(Json::array({e, f}));
  Json out{{"problem", problem_spec_to_json(r.spec)},
           {"instance_index", r.instance_index},
           {"solver_id", r.solver_id},
           {"strategy", strategy_to_json(r.strategy)},
           {"budget", r.budget},
           {"f0", r.f0},
           {"final_f", r.final_f},
           {"f_star_analytic", r.f_star_analytic ? Json(*r.f_star_analytic) : Json()},
           {"evals", r.evals},
           {"history", hist}};
  if (r.error) out["error"] = *r.error;
  return out;
}

BenchRecord bench_record_from_json(const Json& j, const std::string& field) {
  ObjectReader r(j, field);
  BenchRecord rec;
  rec.spec = problem_spec_from_json(r.at("problem"), r.path("problem"));
  rec.instance_index = static_cast<int>(r.integer("instance_index"));
  rec.solver_id = r.string("solver_id");
  rec.strategy = strategy_from_json(r.at("strategy"), r.path("strategy"));
  rec.budget = r.integer("budget");
  rec.f0 = r.number("f0");
  rec.final_f = r.number("final_f");
  if (r.has("f_star_analytic")) rec.f_star_analytic = r.number("f_star_analytic");
  rec.evals = r.integer("evals");
  const Json& hist = r.at("history");
  if (!hist.is_array()) throw ConfigError(r.path("history"), "expected a list of [evals, f] pairs");
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const Json& p = hist[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number())
      throw ConfigError(indexed(r.path("history"), i), "expected [evals, f]");
    rec.history.emplace_back(p[0].get<long>(), p[1].get<double>());
  }
  if (r.has("error")) rec.error = r.string("error");
  r.finish();
  return rec;
}

std::string records_to_ndjson(const std::vector<BenchRecord>& records) {
  std::string out;
  for (const BenchRecord& r : records) {
    out += bench_record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<BenchRecord> records_from_ndjson(const std::string& text) {
  std::vector<BenchRecord> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string field = "line " + std::to_string(lineno);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ConfigError(field, std::string("malformed JSON: ") + e.what());
    }
    out.push_back(bench_record_from_json(j, field));
  }
  return out;
}

std::string canonical_dump(const nlohmann::json& j) { return j.dump(); }

std::string config_digest(const nlohmann::json& j) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical_dump(j))));
  return buf;
}

}  // namespace rds
