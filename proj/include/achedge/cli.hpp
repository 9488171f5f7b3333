#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "achedge/core_model.hpp"

namespace achedge::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepRange {
  std::string parameter;  // kappa, lambda_impact, alpha or t_horizon
  double from = 0.0;
  double to = 0.0;
  std::size_t count = 0;
  bool with_ce = false;
};

struct VerifyOptions {
  bool seed_sweep = false;
  std::size_t seeds = 20;
  std::size_t directions = 20;
  double gradient_eps = 0.05;
  std::size_t martingale_steps = 1000;  // coarse grid; the fine grid doubles it
};

struct RunConfig {
  ProblemSpec problem;
  std::size_t paths = 100000;
  std::size_t steps = 2000;
  std::uint64_t seed = 0;
  std::size_t quad_nodes = 201;
  double quad_tolerance = 1e-6;
  std::size_t profile_points = 101;
  bool per_path_csv = false;
  std::string out;  // directory for CSV output; empty: no files
  int threads = 0;  // 0: ACHEDGE_THREADS or machine default
  std::optional<SweepRange> sweep;
  VerifyOptions verify;
};

// Parses a config document. The problem block is mandatory, every other key optional;
// unknown keys are rejected. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// Sets the OpenMP team size from cfg.threads, falling back to ACHEDGE_THREADS.
void apply_threads(const RunConfig& cfg);

int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_dual(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);

struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
  nlohmann::json stats = nlohmann::json::object();
};

std::vector<CheckResult> run_verify(const RunConfig& cfg);
nlohmann::json verify_report(const std::vector<CheckResult>& checks);

// Entry point shared by the executable and the tests.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace achedge::cli
