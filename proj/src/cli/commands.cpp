#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "achedge/cli.hpp"
#include "achedge/csv.hpp"
#include "achedge/dual.hpp"
#include "achedge/errors.hpp"
#include "achedge/serialize.hpp"
#include "achedge/simulate.hpp"
#include "achedge/strategy.hpp"

namespace achedge::cli {

namespace {

using nlohmann::json;

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// Opens `name` inside the output directory, or returns nullopt when no directory is set.
std::optional<std::ofstream> open_output(const RunConfig& cfg, const std::string& name) {
  if (cfg.out.empty()) return std::nullopt;
  std::filesystem::create_directories(cfg.out);
  const auto path = std::filesystem::path(cfg.out) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  return f;
}

McConfig mc_config(const RunConfig& cfg) { return {cfg.paths, cfg.steps, cfg.seed}; }
QuadConfig quad_config(const RunConfig& cfg) { return {cfg.quad_nodes, cfg.quad_tolerance}; }

double& sweep_field(ProblemSpec& p, const std::string& name) {
  if (name == "kappa") return p.kappa;
  if (name == "lambda_impact") return p.lambda_impact;
  if (name == "alpha") return p.alpha;
  return p.t_horizon;
}

}  // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec p = validate_problem(cfg.problem);
  const auto inst = i_instance(p);
  const auto sol = solve_closed_form(inst);
  const auto margins = positivity_margins(p);

  const std::size_t m = cfg.profile_points;
  std::vector<double> ts(m), target(m), nu(m);
  for (std::size_t i = 0; i < m; ++i) {
    ts[i] = grid_time(p.t_horizon, m, i);
    target[i] = target_position(p, ts[i], p.s0);
    nu[i] = evaluate_delta(sol, inst, ts[i]);
  }

  json report;
  report["problem"] = p;
  report["initial_rate"] = initial_rate(p);
  report["m0_hat"] = m0_hat(p);
  report["i_instance"] = inst;
  report["i_solution"] = sol;
  report["margins"] = {{"min_denominator", margins.min_denominator},
                       {"min_reversion", margins.min_reversion}};
  report["profile"] = {{"t", ts}, {"target_position", target}, {"nu", nu}};
  emit(out, report);

  if (auto f = open_output(cfg, "profile.csv")) {
    CsvWriter w(*f, {"t", "target_position", "nu"});
    for (std::size_t i = 0; i < m; ++i) w.row({ts[i], target[i], nu[i]});
  }
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec p = validate_problem(cfg.problem);
  if (cfg.per_path_csv && cfg.out.empty()) throw ConfigError("per_path_csv needs --out");
  std::vector<PathOutcome> per_path;
  const auto est = mc_certainty_equivalent(p, mc_config(cfg), StrategySource::feedback(),
                                           cfg.per_path_csv ? &per_path : nullptr);
  emit(out, json(est));
  if (cfg.per_path_csv) {
    auto f = open_output(cfg, "paths.csv");
    CsvWriter w(*f, {"path", "claim", "wealth"});
    for (std::size_t i = 0; i < per_path.size(); ++i) {
      w.row({static_cast<double>(i), per_path[i].claim, per_path[i].wealth});
    }
  }
  return kOk;
}

int cmd_dual(const RunConfig& cfg, std::ostream& out) {
  const ProblemSpec p = validate_problem(cfg.problem);
  const auto report = dual_value(p, quad_config(cfg));
  QuadConfig doubled{2 * cfg.quad_nodes - 1, std::numeric_limits<double>::infinity()};
  const double refined = dual_value(p, doubled).total;

  json j = report;
  j["doubled_nodes_total"] = refined;
  j["doubling_change"] = std::abs(refined - report.total);
  emit(out, j);

  if (auto f = open_output(cfg, "j_star.csv")) {
    CsvWriter w(*f, {"s", "j_star"});
    for (const auto& pt : j_profile(p, cfg.quad_nodes)) w.row({pt.s, pt.j_star});
  }
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto checks = run_verify(cfg);
  const json report = verify_report(checks);
  emit(out, report);
  return report.at("passed").get<bool>() ? kOk : kCheckFailed;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.sweep) throw ConfigError("sweep command needs a 'sweep' block in the config");
  const SweepRange& r = *cfg.sweep;

  std::vector<ProblemSpec> specs(r.count, cfg.problem);
  std::vector<double> values(r.count);
  for (std::size_t k = 0; k < r.count; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(r.count - 1);
    values[k] = r.from + (r.to - r.from) * u;
    sweep_field(specs[k], r.parameter) = values[k];
    const auto& q = specs[k];
    if (q.alpha > 0.0 && q.sigma > 0.0 && q.t_horizon > 0.0 &&
        q.kappa >= 1.0 / (2.0 * q.alpha * q.sigma * q.sigma * q.t_horizon)) {
      throw ConfigError("sweep range touches the kappa bound at row " + std::to_string(k));
    }
    try {
      validate_problem(q);
    } catch (const ValidationError& e) {
      throw ConfigError("sweep row " + std::to_string(k) + ": " + e.what());
    }
  }

  std::vector<std::string> header = {r.parameter,  "initial_rate",    "target_position_0",
                                     "i_star",     "dual_total",      "min_denominator",
                                     "min_reversion"};
  if (r.with_ce) {
    header.push_back("ce");
    header.push_back("ce_std_err");
  }
  std::ostringstream table;
  CsvWriter w(table, header);
  for (std::size_t k = 0; k < r.count; ++k) {
    const ProblemSpec& q = specs[k];
    const auto d = dual_value(q, quad_config(cfg));
    const auto margins = positivity_margins(q);
    std::vector<double> row = {values[k],
                               initial_rate(q),
                               target_position(q, 0.0, q.s0),
                               d.i_star,
                               d.total,
                               margins.min_denominator,
                               margins.min_reversion};
    if (r.with_ce) {
      const auto est = mc_certainty_equivalent(q, mc_config(cfg), StrategySource::feedback());
      row.push_back(est.value);
      row.push_back(est.std_err);
    }
    w.row(row);
  }
  out << table.str();
  if (auto f = open_output(cfg, "sweep.csv")) *f << table.str();
  return kOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal liquidation and hedging under linear impact"};
  app.require_subcommand(1);

  std::string config_path;
  std::size_t paths = 0, steps = 0, quad_nodes = 0;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 0;
  bool seed_sweep = false;

  struct Overrides {
    CLI::Option* paths;
    CLI::Option* steps;
    CLI::Option* seed;
    CLI::Option* quad;
    CLI::Option* out;
    CLI::Option* threads;
  };
  std::vector<std::pair<CLI::App*, Overrides>> subs;
  for (const char* name : {"solve", "simulate", "dual", "verify", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    Overrides o{sub->add_option("--paths", paths, "Monte Carlo paths"),
                sub->add_option("--steps", steps, "time steps"),
                sub->add_option("--seed", seed, "64-bit seed"),
                sub->add_option("--quad-nodes", quad_nodes, "Simpson nodes"),
                sub->add_option("--out", out_dir, "directory for CSV output"),
                sub->add_option("--threads", threads, "worker threads")};
    if (std::string(name) == "verify") {
      sub->add_flag("--seed-sweep", seed_sweep, "martingale residual statistics over seeds");
    }
    subs.emplace_back(sub, o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    RunConfig cfg = load_config(config_path);
    CLI::App* chosen = app.get_subcommands().front();
    for (auto& [sub, o] : subs) {
      if (sub != chosen) continue;
      if (o.paths->count()) cfg.paths = paths;
      if (o.steps->count()) cfg.steps = steps;
      if (o.seed->count()) cfg.seed = seed;
      if (o.quad->count()) cfg.quad_nodes = quad_nodes;
      if (o.out->count()) cfg.out = out_dir;
      if (o.threads->count()) cfg.threads = threads;
    }
    if (seed_sweep) cfg.verify.seed_sweep = true;
    if (cfg.paths == 0 || cfg.steps == 0 || cfg.quad_nodes == 0 || cfg.threads < 0) {
      throw ConfigError("numeric parameters must be positive");
    }
    apply_threads(cfg);

    const std::string name = chosen->get_name();
    if (name == "solve") return cmd_solve(cfg, out);
    if (name == "simulate") return cmd_simulate(cfg, out);
    if (name == "dual") return cmd_dual(cfg, out);
    if (name == "verify") return cmd_verify(cfg, out);
    return cmd_sweep(cfg, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ValidationError& e) {
    err << "invalid problem: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kConfigError;
  } catch (const McOverflowError& e) {
    err << "overflow on path " << e.path_index() << ": " << e.what() << '\n';
    return kCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}

}  // namespace achedge::cli
