// End-to-end acceptance battery. One line per criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "achedge/core_model.hpp"
#include "achedge/dual.hpp"
#include "achedge/errors.hpp"
#include "achedge/hyperbolic.hpp"
#include "achedge/simulate.hpp"
#include "achedge/strategy.hpp"
#include "achedge/variational.hpp"

using namespace achedge;

namespace {

struct Outcome {
  bool passed;
  std::string summary;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
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

ProblemSpec worked() {
  ProblemSpec p;
  p.kappa = 0.25;
  return p;
}

ProblemSpec liquidation() {
  ProblemSpec p;
  p.phi0 = 1.0;
  return p;
}

// Random valid specs: kappa anywhere in [0, 0.95 bound).
std::vector<ProblemSpec> random_specs(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); };
  std::vector<ProblemSpec> out;
  while (out.size() < count) {
    ProblemSpec p;
    p.s0 = u(0.5, 2.0);
    p.sigma = u(0.2, 2.0);
    p.mu = u(-0.5, 0.5);
    p.lambda_impact = u(0.1, 5.0);
    p.alpha = u(0.2, 5.0);
    p.t_horizon = u(0.25, 3.0);
    p.phi0 = u(-2.0, 2.0);
    p.kappa = u(0.0, 0.95) * derived_constants(p).kappa_bound;
    out.push_back(validate_problem(p));
  }
  return out;
}

Outcome oracle_equivalence() {
  const std::size_t n = 2000;
  double worst_gap = 0.0, worst_sup = 0.0;
  for (const auto& p : random_specs(100, 1)) {
    const auto inst = i_instance(p);
    const auto sol = solve_closed_form(inst);
    const auto disc = solve_discretized(inst, n);
    worst_gap = std::max(worst_gap, std::abs(sol.value - disc.objective_value) / (1.0 + std::abs(sol.value)));
    for (std::size_t i = 0; i <= n; ++i) {
      worst_sup = std::max(worst_sup, std::abs(disc.values[i] - evaluate_delta(sol, inst, disc.grid[i])));
    }
  }
  return {worst_gap <= 1e-4 && worst_sup <= 1e-3,
          fmt("100 instances, n=2000: max relative value gap %.3e (tol 1e-4), max sup-norm %.3e (tol 1e-3)",
              worst_gap, worst_sup)};
}

Outcome euler_lagrange_identity() {
  const std::size_t n = 10000;
  std::vector<ProblemSpec> specs = random_specs(99, 2);
  specs.insert(specs.begin(), worked());
  double worst_el = 0.0, worst_id = 0.0;
  for (const auto& p : specs) {
    const auto inst = i_instance(p);
    const auto sol = solve_closed_form(inst);
    const double T = inst.horizon, rho = inst.rho(), h = T / n;
    std::vector<double> d(n + 1);
    for (std::size_t i = 0; i <= n; ++i) d[i] = evaluate_delta(sol, inst, grid_time(T, n, i));

    double lo = std::numeric_limits<double>::infinity(), hi = -lo, scale = 0.0;
    const std::size_t m = stencil_spacing(n, std::sqrt(rho) * T);
    for (std::size_t i = 0; i <= n; ++i) {
      const double r = second_derivative(d, i, m, h) - rho * d[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      scale = std::max(scale, rho * std::abs(d[i]));
    }
    scale = std::max({scale, std::abs(lo), std::abs(hi)});
    worst_el = std::max(worst_el, (hi - lo) / scale);

    double square = 0.0, kinetic = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      square += h / 3.0 * (d[i] * d[i] + d[i] * d[i + 1] + d[i + 1] * d[i + 1]);
      kinetic += (d[i + 1] - d[i]) * (d[i + 1] - d[i]) / h;
    }
    const double sr = std::sqrt(rho), b = sr * T;
    const double x = sol.x_bar, y = sol.y_bar;
    const double skew = x * std::tanh(0.5 * b) - sr * y;
    const double closed = sr * (x * x / std::tanh(b) + skew * skew / (b - 2.0 * std::tanh(0.5 * b)));
    worst_id = std::max(worst_id, std::abs(rho * square + kinetic - closed) / std::abs(closed));
  }
  return {worst_el <= 1e-6 && worst_id <= 1e-6,
          fmt("100 instances, n=1e4: delta''-rho*delta relative spread %.3e (tol 1e-6), "
              "energy identity relative error %.3e (tol 1e-6)",
              worst_el, worst_id)};
}

Outcome consistency_chain() {
  double worst = 0.0;
  for (const auto& p : random_specs(100, 3)) {
    const double a = (m0_hat(p) - p.s0) / p.lambda_impact;
    const double b = initial_rate(p);
    const double c = feedback_rate(p, 0.0, p.s0, p.phi0);
    worst = std::max({worst, std::abs(a - b) / (1.0 + std::abs(b)), std::abs(b - c) / (1.0 + std::abs(b))});
  }
  return {worst <= 1e-12,
          fmt("100 specs: max |(m0_hat - S0)/Lambda - initial_rate - feedback_rate(0)| %.3e (tol 1e-12)", worst)};
}

Outcome pure_liquidation() {
  const auto p = liquidation();
  std::vector<double> errs;
  bool identical = true, within = true;
  std::string detail;
  for (std::size_t n : {500, 1000, 2000}) {
    const auto ref = integrate_closed_loop(p, sample_path(p, n, 0, 0));
    double sup = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = grid_time(1.0, n, i);
      sup = std::max(sup, std::abs(ref.position[i] - hyp::sinh_ratio(1.0 - t, 1.0)));
    }
    for (std::uint64_t k = 1; k < 8; ++k) {
      identical = identical && integrate_closed_loop(p, sample_path(p, n, 5, k)).position == ref.position;
    }
    within = within && sup <= 5.0 / n;
    errs.push_back(sup);
    detail += fmt("n=%zu err %.3e (tol %.1e); ", n, sup, 5.0 / n);
  }
  const double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
  const bool first_order = std::abs(r1 - 2.0) <= 0.2 && std::abs(r2 - 2.0) <= 0.2;
  return {within && first_order && identical,
          detail + fmt("ratios %.3f, %.3f (2 +- 0.2); bit-identical across paths: %s", r1, r2,
                       identical ? "yes" : "no")};
}

Outcome strong_duality() {
  const McConfig cfg{100000, 2000, 0};
  bool ok = true;
  std::string detail;
  for (const auto& [name, p] : {std::pair{"worked", worked()}, std::pair{"kappa=0,phi0=1", liquidation()}}) {
    const auto dual = dual_value(p);
    const auto mc = mc_certainty_equivalent(p, cfg, StrategySource::feedback());
    const double z = std::abs(mc.value - dual.total) / mc.std_err;
    ok = ok && z <= 3.0;
    detail += fmt("%s: MC %.6f +- %.6f vs dual %.6f, |z| %.2f (tol 3); ", name, mc.value, mc.std_err,
                  dual.total, z);
  }
  return {ok, detail + "1e5 paths x 2000 steps"};
}

Outcome first_order_optimality() {
  const std::size_t n = 2000;
  const McConfig cfg{100000, n, 0};
  const double eps = 0.05;
  const auto dirs = smooth_directions(n, 20, 0);

  double worst_opt = 0.0;
  for (const auto& g : gradient_check(worked(), StrategySource::feedback(), dirs, {eps}, cfg)) {
    worst_opt = std::max(worst_opt, std::abs(g.slope) / g.std_err);
  }

  // Do nothing until the last interval, then dump everything.
  const auto p = liquidation();
  const auto idle = StrategySource::fixed(forced_liquidation_rates(p, n));
  auto probe = dirs;
  Perturbation toward;
  toward.psi = integrate_closed_loop(p, sample_path(p, n, 0, 0)).phi;
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) head += toward.psi[i];
  toward.psi.back() = -head;
  probe.push_back(toward);
  double best_sub = 0.0;
  for (const auto& g : gradient_check(p, idle, probe, {eps}, cfg)) {
    best_sub = std::max(best_sub, std::abs(g.slope) / g.std_err);
  }
  return {worst_opt <= 3.0 && best_sub > 3.0,
          fmt("optimum: max |slope|/se over 20 directions %.2f (tol 3); "
              "idle strategy: max |slope|/se %.1f (must exceed 3); eps %.2f, 1e5 x 2000",
              worst_opt, best_sub, eps)};
}

Outcome martingale_structure() {
  const auto p = worked();
  const auto coarse = dual_kernel(p, 1000);
  const auto fine = dual_kernel(p, 2000);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = martingale_refinement(p, coarse, fine, seed);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  return {lo >= 1.8 && hi <= 2.2,
          fmt("20 seeds, residual(n=1000)/residual(n=2000) in [%.4f, %.4f] (band [1.8, 2.2])", lo, hi)};
}

Outcome validation_positivity() {
  bool exclusive = true, positive = true;
  double min_margin = std::numeric_limits<double>::infinity();
  for (double alpha : {0.3, 1.0, 3.0}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      for (double T : {0.25, 1.0, 4.0}) {
        for (double lambda : {0.05, 1.0, 20.0}) {
          ProblemSpec p;
          p.alpha = alpha;
          p.sigma = sigma;
          p.t_horizon = T;
          p.lambda_impact = lambda;
          const double bound = derived_constants(p).kappa_bound;
          p.kappa = bound;
          try {
            validate_problem(p);
            exclusive = false;
          } catch (const ValidationError&) {
          }
          p.kappa = std::nextafter(bound, 0.0);
          try {
            validate_problem(p);
          } catch (const ValidationError&) {
            exclusive = false;
          }
          for (int k = 0; k <= 200; ++k) {
            p.kappa = 0.999 * bound * k / 200.0;
            const auto m = positivity_margins(p);
            positive = positive && m.min_denominator > 0.0 && m.min_reversion > 0.0;
            min_margin = std::min({min_margin, m.min_denominator, m.min_reversion});
          }
        }
      }
    }
  }
  return {exclusive && positive,
          fmt("81 parameter sets: bound rejected and its predecessor accepted: %s; "
              "smallest margin over kappa in [0, 0.999 bound]: %.3e (> 0)",
              exclusive ? "yes" : "no", min_margin)};
}

}  // namespace

// Optional arguments select criteria by number, e.g. `acceptance 2 7`.
int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"Euler-Lagrange and energy identity", euler_lagrange_identity},
      {"consistency chain", consistency_chain},
      {"pure liquidation", pure_liquidation},
      {"strong duality", strong_duality},
      {"first-order optimality", first_order_optimality},
      {"martingale structure", martingale_structure},
      {"validation and positivity", validation_positivity},
  };
  int failures = 0;
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int a = 1; a < argc; ++a) {
    const int k = std::atoi(argv[a]);
    if (k >= 1 && k <= static_cast<int>(criteria.size())) selected[k - 1] = true;
  }
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu %s %s: %s [%.1fs]\n", i + 1, o.passed ? "PASS" : "FAIL",
                criteria[i].first, o.summary.c_str(), secs);
    std::fflush(stdout);
    failures += o.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
