#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "rds/benchmark.hpp"
#include "rds/euclidean_pss.hpp"
#include "rds/geometry.hpp"
#include "rds/solver.hpp"
#include "rds/tangent_pss.hpp"

namespace rds {

using Json = nlohmann::ordered_json;

/// Configuration error tied to a JSON field path such as "solver.budget".
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : InvalidArgument("field '" + field + "': " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& field);

/// Matrix as a list of columns.
Json columns_to_json(const Matrix& m);
Matrix columns_from_json(const Json& j, const std::string& field);

/// {"kind":"unit_sphere","n":..}, {"kind":"embedded_sphere","m":..,"n":..}
/// or {"kind":"subspace","Z":[columns]}.
Json manifold_to_json(const Manifold& mf);
Manifold manifold_from_json(const Json& j, const std::string& field);

/// {"generator":"plus_minus","m":3,"rotation_seed":7} (rotation_seed
/// optional) or {"generator":"custom","directions":[[...], ...]}.
Json pss_spec_to_json(const EuclideanPss& pss, std::optional<std::uint64_t> rotation_seed = std::nullopt);
EuclideanPss pss_from_json(const Json& j, const std::string& field);

Json strategy_to_json(const PollingStrategy& s);
PollingStrategy strategy_from_json(const Json& j, const std::string& field);

Json solver_config_to_json(const SolverConfig& c);
SolverConfig solver_config_from_json(const Json& j, const std::string& field);

Json problem_spec_to_json(const ProblemSpec& s);
ProblemSpec problem_spec_from_json(const Json& j, const std::string& field);

Json grid_config_to_json(const GridConfig& c);
GridConfig grid_config_from_json(const Json& j, const std::string& field);

Json iteration_to_json(const IterationRecord& r);
Json trace_to_json(const SolverTrace& t);

Json bench_record_to_json(const BenchRecord& r);
BenchRecord bench_record_from_json(const Json& j, const std::string& field);

/// One compact JSON object per line.
std::string records_to_ndjson(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> records_from_ndjson(const std::string& text);

/// Compact dump with keys sorted recursively; stable across key order.
std::string canonical_dump(const nlohmann::json& j);
std::string config_digest(const nlohmann::json& j);

}  // namespace rds
