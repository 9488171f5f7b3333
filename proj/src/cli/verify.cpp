#include <algorithm>
#include <cmath>
#include <limits>

#include "achedge/cli.hpp"
#include "achedge/dual.hpp"
#include "achedge/errors.hpp"
#include "achedge/hyperbolic.hpp"
#include "achedge/serialize.hpp"
#include "achedge/simulate.hpp"
#include "achedge/strategy.hpp"
#include "achedge/variational.hpp"

namespace achedge::cli {

namespace {

constexpr std::size_t kOracleMaxSteps = 2000;
constexpr std::size_t kFineGrid = 10000;

CheckResult at_most(std::string name, double measured, double tolerance) {
  CheckResult c;
  c.name = std::move(name);
  c.measured = measured;
  c.tolerance = tolerance;
  c.passed = std::isfinite(measured) && measured <= tolerance;
  return c;
}

// Fourth-order estimate of f'' at sample i from samples m steps apart, one-sided within
// 2m of either end. A wide spacing keeps round-off (~eps |f| / (m h)^2) from swamping
// the curvature when sqrt(rho) T is small.
double second_derivative(const std::vector<double>& f, std::size_t i, std::size_t m, double h) {
  const std::size_t n = f.size() - 1;
  const double hh = 12.0 * (m * h) * (m * h);
  if (i >= 2 * m && i + 2 * m <= n) {
    return (-f[i - 2 * m] + 16.0 * f[i - m] - 30.0 * f[i] + 16.0 * f[i + m] - f[i + 2 * m]) / hh;
  }
  const long step = i < 2 * m ? static_cast<long>(m) : -static_cast<long>(m);
  auto at = [&](long k) { return f[static_cast<std::size_t>(static_cast<long>(i) + k * step)]; };
  return (45.0 * at(0) - 154.0 * at(1) + 214.0 * at(2) - 156.0 * at(3) + 61.0 * at(4) - 10.0 * at(5)) / hh;
}

std::size_t stencil_spacing(std::size_t n, double sqrt_rho_t) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(n / (100.0 * std::max(1.0, sqrt_rho_t))));
}

double z_score(double slope, double se) {
  if (se > 0.0) return std::abs(slope) / se;
  return slope == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

void oracle_checks(const ProblemSpec& p, std::size_t steps, std::vector<CheckResult>& out) {
  const auto inst = i_instance(p);
  const auto sol = solve_closed_form(inst);
  const std::size_t n = std::clamp<std::size_t>(steps, 8, kOracleMaxSteps);
  const auto disc = solve_discretized(inst, n);
  double sup = 0.0;
  for (std::size_t i = 0; i < disc.grid.size(); ++i) {
    sup = std::max(sup, std::abs(disc.values[i] - evaluate_delta(sol, inst, disc.grid[i])));
  }
  auto gap = at_most("oracle_value_gap",
                     std::abs(sol.value - disc.objective_value) / (1.0 + std::abs(sol.value)), 1e-4);
  gap.stats = {{"n", n}, {"closed_form", sol.value}, {"discretized", disc.objective_value}};
  out.push_back(gap);
  out.push_back(at_most("oracle_sup_norm", sup, 1e-3));
}

void euler_lagrange_checks(const ProblemSpec& p, std::vector<CheckResult>& out) {
  const auto inst = i_instance(p);
  const auto sol = solve_closed_form(inst);
  const double rho = inst.rho();
  const double T = inst.horizon;
  const std::size_t n = kFineGrid;
  const double h = T / static_cast<double>(n);

  std::vector<double> d(n + 1);
  for (std::size_t i = 0; i <= n; ++i) d[i] = evaluate_delta(sol, inst, grid_time(T, n, i));

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double scale = 0.0;
  const std::size_t m = stencil_spacing(n, std::sqrt(rho) * T);
  for (std::size_t i = 0; i <= n; ++i) {
    const double r = second_derivative(d, i, m, h) - rho * d[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    scale = std::max(scale, rho * std::abs(d[i]));
  }
  scale = std::max({scale, std::abs(lo), std::abs(hi)});
  auto el = at_most("euler_lagrange", scale > 0.0 ? (hi - lo) / scale : 0.0, 1e-6);
  el.stats = {{"min", lo}, {"max", hi}, {"expected", -rho * sol.c3}, {"stencil_spacing", m}};
  out.push_back(el);

  double square = 0.0;
  double kinetic = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = d[i];
    const double b = d[i + 1];
    square += h / 3.0 * (a * a + a * b + b * b);
    kinetic += (b - a) * (b - a) / h;
  }
  const double quadrature = rho * square + kinetic;
  const double sr = std::sqrt(rho);
  const double b = sr * T;
  const double skew = sol.x_bar * std::tanh(0.5 * b) - sr * sol.y_bar;
  const double closed =
      sr * (sol.x_bar * sol.x_bar * hyp::coth(b) + skew * skew / hyp::x_minus_2tanh_half(b));
  auto id = at_most("energy_identity",
                    std::abs(quadrature - closed) / (std::abs(closed) + 1e-300), 1e-6);
  id.stats = {{"quadrature", quadrature}, {"closed_form", closed}};
  out.push_back(id);
}

void chain_check(const ProblemSpec& p, std::vector<CheckResult>& out) {
  const double dual_side = (m0_hat(p) - p.s0) / p.lambda_impact;
  const double rate = initial_rate(p);
  const double feedback = feedback_rate(p, 0.0, p.s0, p.phi0);
  const double diff = std::max(std::abs(dual_side - rate), std::abs(rate - feedback));
  auto c = at_most("consistency_chain", diff / (1.0 + std::abs(rate)), 1e-12);
  c.stats = {{"dual_side", dual_side}, {"initial_rate", rate}, {"feedback_rate", feedback}};
  out.push_back(c);
}

void liquidation_checks(const ProblemSpec& base, std::size_t steps, std::uint64_t seed,
                        std::vector<CheckResult>& out) {
  ProblemSpec p = base;
  p.kappa = 0.0;
  p.mu = 0.0;
  if (p.phi0 == 0.0) p.phi0 = 1.0;
  const std::size_t n = std::max(steps, kMinClosedLoopSteps);
  const double b = std::sqrt(derived_constants(p).rho) * p.t_horizon;

  const auto first = integrate_closed_loop(p, sample_path(p, n, seed, 0));
  const auto second = integrate_closed_loop(p, sample_path(p, n, seed, 1));
  double sup = 0.0;
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = grid_time(p.t_horizon, n, i);
    const double exact = p.phi0 * hyp::sinh_ratio(b * (p.t_horizon - t) / p.t_horizon, b);
    sup = std::max(sup, std::abs(first.position[i] - exact));
    if (first.position[i] != second.position[i]) ++mismatches;
  }
  const double tol = 5.0 * std::max(1.0, std::abs(p.phi0)) / static_cast<double>(n);
  auto c = at_most("pure_liquidation", sup, tol);
  c.stats = {{"n", n}, {"phi0", p.phi0}};
  out.push_back(c);
  out.push_back(at_most("liquidation_path_independence", static_cast<double>(mismatches), 0.0));
}

void duality_checks(const ProblemSpec& p, const RunConfig& cfg, std::vector<CheckResult>& out) {
  const auto report = dual_value(p, {cfg.quad_nodes, cfg.quad_tolerance});
  const double refined =
      dual_value(p, {2 * cfg.quad_nodes - 1, std::numeric_limits<double>::infinity()}).total;
  auto q = at_most("quadrature_convergence", std::abs(refined - report.total),
                   report.quad_error_estimate);
  q.stats = {{"nodes", report.quad_nodes}, {"doubled_nodes_total", refined}};
  out.push_back(q);

  const auto est =
      mc_certainty_equivalent(p, {cfg.paths, cfg.steps, cfg.seed}, StrategySource::feedback());
  auto d = at_most("strong_duality", z_score(est.value - report.total, est.std_err), 3.0);
  d.stats = {{"mc_value", est.value}, {"mc_std_err", est.std_err}, {"dual_total", report.total}};
  out.push_back(d);
}

void gradient_check_at_optimum(const ProblemSpec& p, const RunConfig& cfg,
                               std::vector<CheckResult>& out) {
  const auto dirs = smooth_directions(cfg.steps, cfg.verify.directions, cfg.seed);
  const auto res = gradient_check(p, StrategySource::feedback(), dirs, {cfg.verify.gradient_eps},
                                  {cfg.paths, cfg.steps, cfg.seed});
  double worst = 0.0;
  nlohmann::json z = nlohmann::json::array();
  for (const auto& g : res) {
    const double s = z_score(g.slope, g.std_err);
    z.push_back(s);
    worst = std::max(worst, s);
  }
  auto c = at_most("gradient_at_optimum", worst, 3.0);
  c.stats = {{"eps", cfg.verify.gradient_eps}, {"z_scores", z}};
  out.push_back(c);
}

void martingale_check(const ProblemSpec& p, const RunConfig& cfg, std::vector<CheckResult>& out) {
  const std::size_t n = std::max(cfg.verify.martingale_steps, kMinClosedLoopSteps);
  const auto coarse = dual_kernel(p, n);
  const auto fine = dual_kernel(p, 2 * n);
  const std::size_t count = cfg.verify.seed_sweep ? cfg.verify.seeds : 1;

  std::vector<RefinementStudy> runs(count);
  for (std::size_t k = 0; k < count; ++k) {
    runs[k] = martingale_refinement(p, coarse, fine, cfg.seed + k);
  }

  CheckResult c;
  c.name = "martingale_structure";
  c.tolerance = 0.2;  // |ratio - 2|
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0, largest = 0.0;
  for (const auto& r : runs) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    sum += r.ratio;
    largest = std::max({largest, r.coarse, r.fine});
  }
  if (largest <= 1e-10) {
    c.passed = true;
    c.detail = "residual at round-off level on every path";
  } else {
    c.measured = std::max(std::abs(lo - 2.0), std::abs(hi - 2.0));
    c.passed = std::isfinite(c.measured) && c.measured <= c.tolerance;
  }
  c.stats = {{"n_coarse", n},
             {"seeds", count},
             {"ratio_min", lo},
             {"ratio_max", hi},
             {"ratio_mean", sum / static_cast<double>(count)},
             {"residual_coarse_first", runs.front().coarse},
             {"residual_fine_first", runs.front().fine}};
  out.push_back(c);
}

}  // namespace

std::vector<CheckResult> run_verify(const RunConfig& cfg) {
  std::vector<CheckResult> out;
  ProblemSpec p;
  try {
    p = validate_problem(cfg.problem);
    const auto m = positivity_margins(p);
    CheckResult c;
    c.name = "validation";
    c.measured = std::min(m.min_denominator, m.min_reversion);
    c.passed = c.measured > 0.0;
    c.detail = "smallest positivity margin, must stay > 0";
    out.push_back(c);
  } catch (const ValidationError& e) {
    CheckResult c;
    c.name = "validation";
    c.detail = e.what();
    out.push_back(c);
  }
  if (!out.front().passed) {
    for (const char* name : {"oracle_value_gap", "oracle_sup_norm", "euler_lagrange",
                             "energy_identity", "consistency_chain", "pure_liquidation",
                             "liquidation_path_independence", "quadrature_convergence",
                             "strong_duality", "gradient_at_optimum", "martingale_structure"}) {
      CheckResult c;
      c.name = name;
      c.skipped = true;
      out.push_back(c);
    }
    return out;
  }

  oracle_checks(p, cfg.steps, out);
  euler_lagrange_checks(p, out);
  chain_check(p, out);
  liquidation_checks(p, cfg.steps, cfg.seed, out);
  duality_checks(p, cfg, out);
  gradient_check_at_optimum(p, cfg, out);
  martingale_check(p, cfg, out);
  return out;
}

nlohmann::json verify_report(const std::vector<CheckResult>& checks) {
  nlohmann::json list = nlohmann::json::array();
  bool all = true;
  for (const auto& c : checks) {
    nlohmann::json j = {{"name", c.name},         {"passed", c.passed},
                        {"skipped", c.skipped},   {"measured", c.measured},
                        {"tolerance", c.tolerance}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    if (!c.stats.empty()) j["stats"] = c.stats;
    list.push_back(j);
    all = all && c.passed;
  }
  return {{"passed", all}, {"checks", list}};
}

}  // namespace achedge::cli
