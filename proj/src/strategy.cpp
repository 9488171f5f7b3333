#include "achedge/strategy.hpp"

#include <cmath>
#include <stdexcept>

#include "achedge/hyperbolic.hpp"

namespace achedge {

namespace {

void require_before_maturity(const ProblemSpec& p, double t) {
  if (!(t >= 0.0 && t < p.t_horizon)) {
    throw std::out_of_range("feedback law is defined for 0 <= t < T only");
  }
}

double frictionless_drive(const ProblemSpec& p, double s) {
  return 2.0 * p.kappa * s + p.mu / (p.alpha * p.sigma * p.sigma);
}

double reversion_level(const ProblemSpec& p, const FeedbackCoefficients& fc) {
  return fc.coth_full - 2.0 * p.lambda_impact * derived_constants(p).sqrt_rho * p.kappa;
}

}  // namespace

FeedbackCoefficients feedback_coefficients(const ProblemSpec& p, double t) {
  require_before_maturity(p, t);
  const double sqrt_rho = derived_constants(p).sqrt_rho;
  const double x = sqrt_rho * (p.t_horizon - t);
  FeedbackCoefficients fc{};
  fc.t = t;
  fc.tanh_half = std::tanh(0.5 * x);
  fc.coth_full = hyp::coth(x);
  fc.denom = 1.0 / sqrt_rho - 4.0 * p.kappa * p.lambda_impact * fc.tanh_half;
  return fc;
}

double feedback_rate(const ProblemSpec& p, double t, double s, double phi_pos) {
  const FeedbackCoefficients fc = feedback_coefficients(p, t);
  return (frictionless_drive(p, s) * fc.tanh_half - reversion_level(p, fc) * phi_pos) / fc.denom;
}

double target_position(const ProblemSpec& p, double t, double s) {
  const FeedbackCoefficients fc = feedback_coefficients(p, t);
  return frictionless_drive(p, s) * fc.tanh_half / reversion_level(p, fc);
}

double initial_rate(const ProblemSpec& p) { return feedback_rate(p, 0.0, p.s0, p.phi0); }

FeedbackSchedule feedback_schedule(const ProblemSpec& p, std::size_t n_steps) {
  if (n_steps < 2) throw std::invalid_argument("feedback_schedule: need at least 2 steps");
  FeedbackSchedule sch;
  sch.dt = p.t_horizon / static_cast<double>(n_steps);
  const std::size_t m = n_steps - 1;
  sch.price_gain.resize(m);
  sch.offset.resize(m);
  sch.reversion.resize(m);
  const double drift_drive = p.mu / (p.alpha * p.sigma * p.sigma);
  for (std::size_t i = 0; i < m; ++i) {
    const FeedbackCoefficients fc = feedback_coefficients(p, grid_time(p.t_horizon, n_steps, i));
    sch.price_gain[i] = 2.0 * p.kappa * fc.tanh_half / fc.denom;
    sch.offset[i] = drift_drive * fc.tanh_half / fc.denom;
    sch.reversion[i] = reversion_level(p, fc) / fc.denom;
  }
  return sch;
}

StrategyPath integrate_closed_loop(const ProblemSpec& p, const PricePath& path) {
  return integrate_closed_loop(p, feedback_schedule(p, path.n_steps()), path);
}

StrategyPath integrate_closed_loop(const ProblemSpec& p, const FeedbackSchedule& schedule,
                                   const PricePath& path) {
  const std::size_t n = path.n_steps();
  if (n < kMinClosedLoopSteps) {
    throw std::invalid_argument("integrate_closed_loop: need at least 16 steps");
  }
  if (path.prices.size() != path.grid.size()) {
    throw std::invalid_argument("integrate_closed_loop: price/grid size mismatch");
  }
  if (schedule.n_steps() != n) {
    throw std::invalid_argument("integrate_closed_loop: schedule built for a different grid");
  }
  require_uniform_grid(path.grid, p.t_horizon);

  StrategyPath out;
  out.grid = path.grid;
  out.phi.resize(n);
  out.position.resize(n + 1);
  out.position[0] = p.phi0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.phi[i] = schedule.rate(i, path.prices[i], out.position[i]);
    out.position[i + 1] = out.position[i] + out.phi[i] * schedule.dt;
  }
  out.phi[n - 1] = -out.position[n - 1] / schedule.dt;
  out.position[n] = 0.0;
  return out;
}

}  // namespace achedge
