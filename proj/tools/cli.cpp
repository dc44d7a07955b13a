#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rds/benchmark.hpp"
#include "rds/euclidean_pss.hpp"
#include "rds/io.hpp"
#include "rds/random.hpp"
#include "rds/serialization.hpp"
#include "rds/solver.hpp"
#include "rds/sphere_analysis.hpp"

namespace rds::cli {
namespace fs = std::filesystem;

namespace {

/// Usage or configuration problem; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  int threads = 1;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json load_config(const std::string& path) {
  if (path.empty()) throw UsageError("--config is required");
  if (!fs::is_regular_file(path)) throw UsageError("config file '" + path + "' does not exist");
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError("config '" + path + "': " + e.what());
  }
}

std::uint64_t resolve_seed(const CommonOptions& opt, std::uint64_t fallback) {
  if (opt.seed) return *opt.seed;
  if (const char* env = std::getenv("RDS_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw UsageError(std::string("RDS_SEED is not an unsigned integer: '") + env + "'");
    return v;
  }
  return fallback;
}

/// Collects output files and writes them, then the manifest, into --out.
class OutputSet {
 public:
  OutputSet(const CommonOptions& opt, std::string subcommand)
      : dir_(opt.out), subcommand_(std::move(subcommand)), started_(utc_now()) {}

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  void commit(const nlohmann::json& effective_config, std::uint64_t seed, const Json& extra = Json::object()) {
    Json names = Json::array();
    for (const auto& [name, content] : files_) {
      write_text_file(dir_ / name, content);
      names.push_back(name);
    }
    Json manifest{{"tool_version", kToolVersion},
                  {"subcommand", subcommand_},
                  {"config_digest", config_digest(effective_config)},
                  {"seed", seed},
                  {"output_files", names},
                  {"started", started_},
                  {"finished", utc_now()}};
    for (auto it = extra.begin(); it != extra.end(); ++it) manifest[it.key()] = it.value();
    write_text_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::string subcommand_;
  std::string started_;
  std::vector<std::pair<std::string, std::string>> files_;
};

/// Rounded to 1e-10; integral values print without a fraction.
Json rounded(double v) {
  const double r = std::round(v * 1e10) / 1e10;
  if (std::abs(r) < 1e15 && r == std::floor(r)) return static_cast<long long>(r);
  return r;
}

const Json kDistributions{{"barycenter_points", "standard_gaussian"},
                          {"quadratic_b", "standard_gaussian"},
                          {"quadratic_eigenvalues", "uniform[0.1,1]"},
                          {"rayleigh_matrix", "symmetrized_standard_gaussian"},
                          {"subspace_frame", "haar"}};

int run_cm(const CommonOptions& opt, std::ostream& out) {
  const Json cfg = load_config(opt.config);
  const EuclideanPss pss = pss_from_json(cfg, "");
  const std::uint64_t seed = resolve_seed(opt, 0);
  const MeasureReport report = cosine_measure_exact(pss);
  Json result{{"cm", rounded(report.cosine_measure)},
              {"chi", report.complexity_measure ? rounded(*report.complexity_measure) : Json()},
              {"cardinality", report.cardinality}};
  OutputSet files(opt, "cm");
  files.add("cm.json", result.dump() + "\n");
  files.commit(cfg, seed);
  out << result.dump() << "\n";
  return 0;
}

struct SphereStudyOptions {
  std::optional<int> heatmap;
  std::vector<int> scan;
  std::optional<int> samples;
  std::vector<int> corollary;
};

int run_sphere_study(const CommonOptions& opt, const SphereStudyOptions& so, std::ostream& out) {
  Json cfg = opt.config.empty() ? Json::object() : load_config(opt.config);
  if (!cfg.is_object()) throw ConfigError("<root>", "expected an object");
  for (auto it = cfg.begin(); it != cfg.end(); ++it)
    if (it.key() != "heatmap_resolution" && it.key() != "scan_n" && it.key() != "samples" &&
        it.key() != "corollary_n" && it.key() != "seed")
      throw ConfigError(it.key(), "unknown field");
  auto int_field = [&](const char* key) -> std::optional<int> {
    if (!cfg.contains(key)) return std::nullopt;
    if (!cfg[key].is_number_integer()) throw ConfigError(key, "expected an integer");
    return cfg[key].get<int>();
  };
  auto list_field = [&](const char* key) {
    std::vector<int> v;
    if (!cfg.contains(key)) return v;
    if (!cfg[key].is_array()) throw ConfigError(key, "expected a list of integers");
    for (std::size_t i = 0; i < cfg[key].size(); ++i) {
      if (!cfg[key][i].is_number_integer())
        throw ConfigError(std::string(key) + "[" + std::to_string(i) + "]", "expected an integer");
      v.push_back(cfg[key][i].get<int>());
    }
    return v;
  };
  std::uint64_t config_seed = 0;
  if (cfg.contains("seed")) {
    if (!cfg["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    config_seed = cfg["seed"].get<std::uint64_t>();
  }
  const std::optional<int> heatmap = so.heatmap ? so.heatmap : int_field("heatmap_resolution");
  const std::vector<int> scan = !so.scan.empty() ? so.scan : list_field("scan_n");
  const int samples = so.samples ? *so.samples : int_field("samples").value_or(100);
  const std::vector<int> corollary = !so.corollary.empty() ? so.corollary : list_field("corollary_n");
  const std::uint64_t seed = resolve_seed(opt, config_seed);
  if (!heatmap && scan.empty() && corollary.empty())
    throw UsageError("sphere-study: nothing to do; pass --heatmap, --scan or --corollary");
  if (heatmap && *heatmap < 8) throw ConfigError("heatmap_resolution", "must be >= 8");
  for (int n : scan)
    if (n < 3) throw ConfigError("scan_n", "every n must be >= 3");
  for (int n : corollary)
    if (n < 2) throw ConfigError("corollary_n", "every n must be >= 2");
  if (samples < 1) throw ConfigError("samples", "must be >= 1");

  Json effective{{"seed", seed}, {"samples", samples}, {"scan_n", scan}, {"corollary_n", corollary}};
  if (heatmap) effective["heatmap_resolution"] = *heatmap;

  OutputSet files(opt, "sphere-study");
  if (heatmap) files.add("heatmap.csv", heatmap_csv(sphere_heatmap(*heatmap)));
  if (!scan.empty()) {
    const std::string csv = range_scan_csv(cm_range_scan(scan, samples, seed));
    files.add("range_scan.csv", csv);
    out << csv;
  }
  if (!corollary.empty()) files.add("corollary.csv", corollary_csv(corollary_table(corollary)));
  files.commit(effective, seed);
  return 0;
}

int run_solve(const CommonOptions& opt, std::ostream& out) {
  const Json cfg = load_config(opt.config);
  if (!cfg.is_object()) throw ConfigError("<root>", "expected an object");
  for (auto it = cfg.begin(); it != cfg.end(); ++it)
    if (it.key() != "problem" && it.key() != "solver") throw ConfigError(it.key(), "unknown field");
  if (!cfg.contains("problem")) throw ConfigError("problem", "missing required field");
  const ProblemSpec spec = problem_spec_from_json(cfg["problem"], "problem");
  SolverConfig sc = cfg.contains("solver") ? solver_config_from_json(cfg["solver"], "solver") : SolverConfig{};
  sc.seed = resolve_seed(opt, sc.seed);
  const BenchmarkInstance inst = generate_instance(spec);
  const SolverTrace trace = direct_search(inst.problem, sc);

  Json result = trace_to_json(trace);
  result["f_star_analytic"] = inst.f_star;
  Json effective{{"problem", problem_spec_to_json(spec)}, {"solver", solver_config_to_json(sc)}};
  OutputSet files(opt, "solve");
  files.add("trace.json", result.dump(1) + "\n");
  files.commit(effective, sc.seed, Json{{"distributions", kDistributions}});
  out << "final_f=" << format_double(trace.final_f) << " f_star=" << format_double(inst.f_star)
      << " evaluations=" << trace.evaluations << "\n";
  return 0;
}

int run_bench(const CommonOptions& opt, std::ostream& out) {
  const Json cfg = load_config(opt.config);
  GridConfig grid = grid_config_from_json(cfg, "");
  grid.base_seed = resolve_seed(opt, grid.base_seed);
  grid.threads = opt.threads;
  const std::vector<BenchRecord> records = run_grid(grid);
  int failures = 0;
  for (const BenchRecord& r : records)
    if (r.error) ++failures;
  OutputSet files(opt, "bench");
  files.add("records.ndjson", records_to_ndjson(records));
  files.commit(grid_config_to_json(grid), grid.base_seed,
               Json{{"distributions", kDistributions}, {"records", records.size()}, {"failed_solves", failures}});
  out << records.size() << " records, " << failures << " failed\n";
  return 0;
}

std::string profile_csv(const DataProfile& p) {
  std::ostringstream os;
  os << "alpha";
  for (const auto& [id, curve] : p.curves) os << ',' << id;
  os << '\n';
  for (std::size_t a = 0; a < p.alphas.size(); ++a) {
    os << format_double(p.alphas[a]);
    for (const auto& [id, curve] : p.curves) os << ',' << format_double(curve[a]);
    os << '\n';
  }
  return os.str();
}

std::string head_to_head_csv(const HeadToHeadTable& t) {
  std::ostringstream os;
  os << "family,m,codim,generator,rotate,wins,pairs,fraction\n";
  for (const auto& [key, cell] : t.cells) {
    os << key.family << ',' << key.m << ',' << key.codim << ',' << to_string(key.generator) << ','
       << (key.rotate ? "true" : "false") << ',' << cell.wins << ',' << cell.pairs << ',';
    if (const auto f = cell.fraction()) os << format_double(*f);
    os << '\n';
  }
  return os.str();
}

int run_profiles(const CommonOptions& opt, const std::string& records_flag, std::ostream& out) {
  Json cfg = opt.config.empty() ? Json::object() : load_config(opt.config);
  if (!cfg.is_object()) throw ConfigError("<root>", "expected an object");
  for (auto it = cfg.begin(); it != cfg.end(); ++it)
    if (it.key() != "records" && it.key() != "tau" && it.key() != "alpha_max")
      throw ConfigError(it.key(), "unknown field");
  std::string records_path = records_flag;
  if (records_path.empty() && cfg.contains("records")) {
    if (!cfg["records"].is_string()) throw ConfigError("records", "expected a path");
    records_path = cfg["records"].get<std::string>();
  }
  if (records_path.empty()) throw UsageError("profiles: pass --records or set 'records' in the config");
  if (!fs::is_regular_file(records_path)) throw UsageError("records file '" + records_path + "' does not exist");
  double tau = 1e-2;
  int alpha_max = 100;
  if (cfg.contains("tau")) {
    if (!cfg["tau"].is_number() || !(cfg["tau"].get<double>() > 0.0)) throw ConfigError("tau", "expected a positive number");
    tau = cfg["tau"].get<double>();
  }
  if (cfg.contains("alpha_max")) {
    if (!cfg["alpha_max"].is_number_integer() || cfg["alpha_max"].get<int>() < 0)
      throw ConfigError("alpha_max", "expected a non-negative integer");
    alpha_max = cfg["alpha_max"].get<int>();
  }
  const std::vector<BenchRecord> records = records_from_ndjson(read_text_file(records_path));
  const auto profiles = data_profiles(records, tau, alpha_max);
  const HeadToHeadTable h2h = head_to_head(records);

  OutputSet files(opt, "profiles");
  Json panels = Json::array();
  for (const auto& [key, prof] : profiles) {
    const std::string name = "profile_m" + std::to_string(key.first) + "_codim" + std::to_string(key.second) + ".csv";
    files.add(name, profile_csv(prof));
    panels.push_back(Json{{"m", key.first},
                          {"codim", key.second},
                          {"problems", prof.problem_count},
                          {"proxy_violations", prof.proxy_violations}});
  }
  files.add("head_to_head.csv", head_to_head_csv(h2h));
  const std::uint64_t records_hash = fnv1a(read_text_file(records_path));
  Json effective{{"records_fnv1a", records_hash}, {"tau", tau}, {"alpha_max", alpha_max}};
  files.commit(effective, resolve_seed(opt, 0), Json{{"panels", panels}, {"unpaired_records", h2h.unpaired}});
  out << profiles.size() << " panels, " << h2h.unpaired << " unpaired records\n";
  return 0;
}

void add_common(CLI::App* sub, CommonOptions& opt, bool config_required) {
  auto* c = sub->add_option("--config", opt.config, "JSON configuration file");
  if (config_required) c->required();
  sub->add_option("--seed", opt.seed, "Seed (falls back to RDS_SEED, then the config)");
  sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
  sub->add_option("--threads", opt.threads, "Worker threads for grid runs")->check(CLI::PositiveNumber)->capture_default_str();
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Riemannian direct search toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonOptions opt;
  SphereStudyOptions so;
  std::string records_flag;

  auto* cm = app.add_subcommand("cm", "Exact cosine and complexity measure of a positive spanning set");
  add_common(cm, opt, true);
  auto* sphere = app.add_subcommand("sphere-study", "Projected +/- basis cosine measure on the unit sphere");
  add_common(sphere, opt, false);
  sphere->add_option("--heatmap", so.heatmap, "Resolution of the S^2 heatmap grid");
  sphere->add_option("--scan", so.scan, "Ambient dimensions n for the range scan")->delimiter(',');
  sphere->add_option("--samples", so.samples, "Random points per n in the range scan (default 100)");
  sphere->add_option("--corollary", so.corollary, "Dimensions n for the complexity witness table")->delimiter(',');
  auto* solve = app.add_subcommand("solve", "Run direct search on one benchmark instance");
  add_common(solve, opt, true);
  auto* bench = app.add_subcommand("bench", "Run a benchmark grid and write NDJSON records");
  add_common(bench, opt, true);
  auto* profiles = app.add_subcommand("profiles", "Data profiles and head-to-head tables from records");
  add_common(profiles, opt, false);
  profiles->add_option("--records", records_flag, "NDJSON records written by bench");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (app.get_subcommands().empty()) err << app.help();
    return 2;
  }

  try {
    if (*cm) return run_cm(opt, out);
    if (*sphere) return run_sphere_study(opt, so, out);
    if (*solve) return run_solve(opt, out);
    if (*bench) return run_bench(opt, out);
    if (*profiles) return run_profiles(opt, records_flag, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"rds"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rds::cli
