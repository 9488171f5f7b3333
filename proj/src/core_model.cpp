#include "achedge/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "achedge/errors.hpp"
#include "achedge/hyperbolic.hpp"

namespace achedge {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

ProblemSpec validate_problem(const ProblemSpec& raw) {
  const double fields[] = {raw.s0,    raw.sigma, raw.mu,        raw.lambda_impact,
                           raw.alpha, raw.kappa, raw.t_horizon, raw.phi0};
  for (double v : fields) require(std::isfinite(v), "all parameters must be finite");

  require(raw.sigma > 0.0, "sigma must be > 0");
  require(raw.lambda_impact > 0.0, "lambda_impact must be > 0");
  require(raw.alpha > 0.0, "alpha must be > 0");
  require(raw.t_horizon > 0.0, "t_horizon must be > 0");
  require(raw.kappa >= 0.0, "kappa must be >= 0");

  const DerivedConstants d = derived_constants(raw);
  require(raw.kappa < d.kappa_bound,
          "kappa must be < 1/(2 alpha sigma^2 t_horizon) = " + std::to_string(d.kappa_bound));

  const PositivityMargins m = positivity_margins(raw);
  require(m.min_denominator > 0.0, "feedback denominator is not positive on [0, T)");
  require(m.min_reversion > 0.0, "mean-reversion coefficient is not positive on [0, T)");
  return raw;
}

DerivedConstants derived_constants(const ProblemSpec& p) {
  const double var = p.sigma * p.sigma;
  const double rho = p.alpha * var / p.lambda_impact;
  return {rho, std::sqrt(rho), 1.0 / (2.0 * p.alpha * var * p.t_horizon)};
}

PositivityMargins positivity_margins(const ProblemSpec& p, std::size_t grid_points) {
  const DerivedConstants d = derived_constants(p);
  const double impact_term = 2.0 * p.lambda_impact * d.sqrt_rho * p.kappa;
  PositivityMargins m{std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()};
  // Points t_k = k T / grid_points, k < grid_points: uniform on [0, T).
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double tau = p.t_horizon - p.t_horizon * static_cast<double>(k) /
                                         static_cast<double>(grid_points);
    const double x = d.sqrt_rho * tau;
    const double den = 1.0 / d.sqrt_rho - 4.0 * p.kappa * p.lambda_impact * std::tanh(0.5 * x);
    const double rev = hyp::coth(x) - impact_term;
    m.min_denominator = std::min(m.min_denominator, den);
    m.min_reversion = std::min(m.min_reversion, rev);
  }
  return m;
}

double grid_time(double horizon, std::size_t n, std::size_t i) {
  if (i == n) return horizon;
  return horizon * static_cast<double>(i) / static_cast<double>(n);
}

}  // namespace achedge
