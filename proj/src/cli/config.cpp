#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <omp.h>

#include "achedge/cli.hpp"
#include "achedge/errors.hpp"
#include "achedge/serialize.hpp"

namespace achedge::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

std::size_t positive_count(const json& obj, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw ConfigError(std::string("'") + key + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

double finite_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

bool boolean(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw ConfigError(std::string("'") + key + "' must be a boolean");
  return obj.at(key).get<bool>();
}

SweepRange parse_sweep(const json& s) {
  if (!s.is_object()) throw ConfigError("'sweep' must be an object");
  reject_unknown(s, {"parameter", "from", "to", "count", "ce"}, "sweep");
  if (!s.contains("parameter") || !s.at("parameter").is_string()) {
    throw ConfigError("sweep.parameter must be one of kappa, lambda_impact, alpha, t_horizon");
  }
  SweepRange r;
  r.parameter = s.at("parameter").get<std::string>();
  if (r.parameter != "kappa" && r.parameter != "lambda_impact" && r.parameter != "alpha" &&
      r.parameter != "t_horizon") {
    throw ConfigError("sweep.parameter must be one of kappa, lambda_impact, alpha, t_horizon");
  }
  if (!s.contains("from") || !s.contains("to") || !s.contains("count")) {
    throw ConfigError("sweep needs from, to and count");
  }
  r.from = finite_number(s, "from", 0.0);
  r.to = finite_number(s, "to", 0.0);
  r.count = positive_count(s, "count", 0);
  if (r.count < 2) throw ConfigError("sweep.count must be at least 2");
  r.with_ce = boolean(s, "ce", false);
  return r;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"problem", "paths", "steps", "seed", "quad_nodes", "quad_tolerance",
                  "profile_points", "per_path_csv", "out", "threads", "sweep", "verify"},
                 "config");
  if (!doc.contains("problem")) throw ConfigError("config is missing 'problem'");

  RunConfig cfg;
  try {
    cfg.problem = doc.at("problem").get<ProblemSpec>();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  cfg.paths = positive_count(doc, "paths", cfg.paths);
  cfg.steps = positive_count(doc, "steps", cfg.steps);
  cfg.quad_nodes = positive_count(doc, "quad_nodes", cfg.quad_nodes);
  cfg.profile_points = positive_count(doc, "profile_points", cfg.profile_points);
  cfg.quad_tolerance = finite_number(doc, "quad_tolerance", cfg.quad_tolerance);
  if (!(cfg.quad_tolerance > 0.0)) throw ConfigError("'quad_tolerance' must be positive");
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.per_path_csv = boolean(doc, "per_path_csv", false);
  if (doc.contains("out")) {
    if (!doc.at("out").is_string()) throw ConfigError("'out' must be a string");
    cfg.out = doc.at("out").get<std::string>();
  }
  if (doc.contains("threads")) cfg.threads = static_cast<int>(positive_count(doc, "threads", 1));
  if (doc.contains("sweep")) cfg.sweep = parse_sweep(doc.at("sweep"));
  if (doc.contains("verify")) {
    const json& v = doc.at("verify");
    if (!v.is_object()) throw ConfigError("'verify' must be an object");
    reject_unknown(v, {"seed_sweep", "seeds", "directions", "gradient_eps", "martingale_steps"},
                   "verify");
    cfg.verify.seed_sweep = boolean(v, "seed_sweep", false);
    cfg.verify.seeds = positive_count(v, "seeds", cfg.verify.seeds);
    cfg.verify.directions = positive_count(v, "directions", cfg.verify.directions);
    cfg.verify.martingale_steps = positive_count(v, "martingale_steps", cfg.verify.martingale_steps);
    cfg.verify.gradient_eps = finite_number(v, "gradient_eps", cfg.verify.gradient_eps);
    if (!(cfg.verify.gradient_eps > 0.0)) throw ConfigError("verify.gradient_eps must be positive");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return parse_config(doc);
}

void apply_threads(const RunConfig& cfg) {
  int n = cfg.threads;
  if (n <= 0) {
    if (const char* env = std::getenv("ACHEDGE_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || v <= 0) {
        throw ConfigError("ACHEDGE_THREADS must be a positive integer");
      }
      n = static_cast<int>(v);
    }
  }
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace achedge::cli
