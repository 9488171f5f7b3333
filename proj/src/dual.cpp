#include "achedge/dual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "achedge/errors.hpp"
#include "achedge/rng.hpp"
#include "achedge/strategy.hpp"

namespace achedge {

namespace {

bool below_degenerate_horizon(const ProblemSpec& p, double s) {
  return derived_constants(p).sqrt_rho * (p.t_horizon - s) < kMinScaledHorizon;
}

void require_simpson_nodes(std::size_t nodes) {
  if (nodes < 5 || (nodes - 1) % 4 != 0) {
    throw std::invalid_argument("quadrature nodes must satisfy nodes >= 5 and (nodes - 1) % 4 == 0");
  }
}

double simpson(std::span<const double> f, double h) {
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t k = 1; k + 1 < f.size(); ++k) (k % 2 ? odd : even) += f[k];
  return h / 3.0 * (f.front() + f.back() + 4.0 * odd + 2.0 * even);
}

}  // namespace

VariationalInstance i_instance(const ProblemSpec& p) {
  return {p.kappa, p.s0, p.mu, p.phi0, p.sigma, p.alpha, p.lambda_impact, p.t_horizon};
}

VariationalInstance j_instance(const ProblemSpec& p, double s) {
  if (!(s >= 0.0 && s < p.t_horizon)) throw std::out_of_range("j_instance: s must lie in [0, T)");
  const double var = p.sigma * p.sigma;
  return {p.kappa * var, 1.0, 0.0, 0.0, 1.0, p.alpha, p.lambda_impact / var, p.t_horizon - s};
}

double j_star(const ProblemSpec& p, double s) {
  if (!(s >= 0.0 && s <= p.t_horizon)) throw std::out_of_range("j_star: s must lie in [0, T]");
  if (s == p.t_horizon || below_degenerate_horizon(p, s)) return p.kappa * p.sigma * p.sigma;
  return solve_closed_form(j_instance(p, s)).value;
}

std::vector<JProfilePoint> j_profile(const ProblemSpec& p, std::size_t nodes) {
  if (nodes < 2) throw std::invalid_argument("j_profile: need at least two nodes");
  std::vector<JProfilePoint> out(nodes);
  const auto n = static_cast<std::int64_t>(nodes);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    const double s = grid_time(p.t_horizon, nodes - 1, static_cast<std::size_t>(k));
    out[static_cast<std::size_t>(k)] = {s, j_star(p, s)};
  }
  return out;
}

DualValueReport dual_value(const ProblemSpec& p, const QuadConfig& quad) {
  require_simpson_nodes(quad.nodes);
  const std::vector<JProfilePoint> prof = j_profile(p, quad.nodes);
  std::vector<double> fine(prof.size());
  std::vector<double> coarse;
  for (std::size_t k = 0; k < prof.size(); ++k) {
    fine[k] = prof[k].j_star;
    if (k % 2 == 0) coarse.push_back(prof[k].j_star);
  }
  const double h = p.t_horizon / static_cast<double>(quad.nodes - 1);
  const double j_fine = simpson(fine, h);
  const double j_coarse = simpson(coarse, 2.0 * h);

  DualValueReport r{};
  r.i_star = solve_closed_form(i_instance(p)).value;
  r.j_integral = j_fine;
  r.total = r.i_star + r.j_integral;
  r.quad_nodes = quad.nodes;
  r.quad_error_estimate = std::abs(j_fine - j_coarse);
  if (!(r.quad_error_estimate <= quad.tolerance)) {
    throw QuadratureError("J-integral quadrature did not converge: error estimate " +
                          std::to_string(r.quad_error_estimate) + " > tolerance " +
                          std::to_string(quad.tolerance));
  }
  return r;
}

double m0_hat(const ProblemSpec& p) {
  return p.s0 + mean_of_optimal_delta(i_instance(p)) - p.phi0 * p.lambda_impact / p.t_horizon;
}

double gamma_hat(const ProblemSpec& p, double s) {
  if (!(s >= 0.0 && s < p.t_horizon)) throw std::out_of_range("gamma_hat: s must lie in [0, T)");
  if (below_degenerate_horizon(p, s)) return 1.0;
  return 1.0 + solve_closed_form(j_instance(p, s)).mean;
}

DualKernel dual_kernel(const ProblemSpec& p, std::size_t n_steps) {
  if (n_steps < 2) throw std::invalid_argument("dual_kernel: need at least 2 steps");
  DualKernel k;
  k.n_steps = n_steps;
  k.dt = p.t_horizon / static_cast<double>(n_steps);
  k.m0_hat = m0_hat(p);

  const VariationalInstance ii = i_instance(p);
  const VariationalSolution is = solve_closed_form(ii);
  k.nu.resize(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) {
    k.nu[i] = evaluate_delta(is, ii, grid_time(p.t_horizon, n_steps, i));
  }

  k.gamma_hat.resize(n_steps);
  k.kernel.resize(n_steps);
  const auto n = static_cast<std::int64_t>(n_steps);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t jj = 0; jj < n; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    const double s = grid_time(p.t_horizon, n_steps, j);
    std::vector<double>& row = k.kernel[j];
    row.resize(n_steps - j);
    if (below_degenerate_horizon(p, s)) {
      k.gamma_hat[j] = 1.0;
      std::fill(row.begin(), row.end(), 0.0);
      continue;
    }
    const VariationalInstance ji = j_instance(p, s);
    const VariationalSolution js = solve_closed_form(ji);
    k.gamma_hat[j] = 1.0 + js.mean;
    for (std::size_t i = j + 1; i <= n_steps; ++i) {
      const double lag = std::min(grid_time(p.t_horizon, n_steps, i) - s, ji.horizon);
      row[i - j - 1] = evaluate_delta(js, ji, lag);
    }
  }
  return k;
}

std::vector<double> brownian_increments(double horizon, std::size_t n_steps, std::uint64_t seed) {
  const double scale = std::sqrt(horizon / static_cast<double>(n_steps));
  std::vector<double> dw(n_steps);
  for (std::size_t j = 0; j < n_steps; ++j) dw[j] = scale * standard_normal(seed, 0, j);
  return dw;
}

std::vector<double> coarsen_increments(std::span<const double> dw, std::size_t factor) {
  if (factor == 0 || dw.size() % factor != 0) {
    throw std::invalid_argument("coarsen_increments: factor must divide the number of steps");
  }
  std::vector<double> out(dw.size() / factor, 0.0);
  for (std::size_t j = 0; j < dw.size(); ++j) out[j / factor] += dw[j];
  return out;
}

MartingaleResidual verify_martingale_structure(const ProblemSpec& p, const DualKernel& kernel,
                                               std::span<const double> dw,
                                               double terminal_exclusion) {
  const std::size_t n = kernel.n_steps;
  if (dw.size() != n) throw std::invalid_argument("increments do not match the kernel grid");
  if (!(terminal_exclusion >= 0.0 && terminal_exclusion < 1.0)) {
    throw std::invalid_argument("terminal_exclusion must lie in [0, 1)");
  }
  const double t_cut = (1.0 - terminal_exclusion) * p.t_horizon * (1.0 + 1e-12);

  MartingaleResidual out{n, 0.0, 0.0};
  double m = kernel.m0_hat;
  double position = p.phi0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid_time(p.t_horizon, n, i);
    double noise = 0.0;
    for (std::size_t j = 0; j < i; ++j) noise += (1.0 + kernel.l(i, j)) * dw[j];
    const double s = p.s0 + kernel.nu[i] + p.sigma * noise;

    const double rate = feedback_rate(p, t, s, position);
    const double dual_rate = (m - s) / p.lambda_impact;
    const double r = std::abs(rate - dual_rate);
    out.max_residual_full = std::max(out.max_residual_full, r);
    if (t <= t_cut) out.max_residual = std::max(out.max_residual, r);

    position += rate * kernel.dt;
    m += p.sigma * kernel.gamma_hat[i] * dw[i];
  }
  return out;
}

MartingaleResidual verify_martingale_structure(const ProblemSpec& p, std::uint64_t seed,
                                               std::size_t n_steps, double terminal_exclusion) {
  const DualKernel k = dual_kernel(p, n_steps);
  return verify_martingale_structure(p, k, brownian_increments(p.t_horizon, n_steps, seed),
                                     terminal_exclusion);
}

RefinementStudy martingale_refinement(const ProblemSpec& p, const DualKernel& coarse,
                                      const DualKernel& fine, std::uint64_t seed,
                                      double terminal_exclusion) {
  if (fine.n_steps != 2 * coarse.n_steps) {
    throw std::invalid_argument("martingale_refinement: fine grid must double the coarse one");
  }
  const auto dw = brownian_increments(p.t_horizon, fine.n_steps, seed);
  const double rf = verify_martingale_structure(p, fine, dw, terminal_exclusion).max_residual;
  const double rc =
      verify_martingale_structure(p, coarse, coarsen_increments(dw, 2), terminal_exclusion)
          .max_residual;
  return {seed, rc, rf, rc / rf};
}

}  // namespace achedge
