#pragma once

#include <cstddef>

namespace achedge {

// Parameterization of the hedging problem: Bachelier price S_t = s0 + sigma W_t + mu t,
// temporary impact lambda_impact, CARA risk aversion alpha, claim kappa * S_T^2,
// horizon t_horizon and initial position phi0 that must be liquidated by t_horizon.
struct ProblemSpec {
  double s0 = 1.0;
  double sigma = 1.0;
  double mu = 0.0;
  double lambda_impact = 1.0;
  double alpha = 1.0;
  double kappa = 0.0;
  double t_horizon = 1.0;
  double phi0 = 0.0;

  bool operator==(const ProblemSpec&) const = default;
};

struct DerivedConstants {
  double rho;          // risk-liquidity ratio alpha sigma^2 / lambda
  double sqrt_rho;
  double kappa_bound;  // 1 / (2 alpha sigma^2 T), exclusive upper bound on kappa
};

// Smallest values over [0, T) of the two quantities that must stay positive for the
// feedback law to be well defined:
//   denominator  1/sqrt(rho) - 4 kappa Lambda tanh(sqrt(rho)(T-t)/2)
//   reversion    coth(sqrt(rho)(T-t)) - 2 Lambda sqrt(rho) kappa
struct PositivityMargins {
  double min_denominator;
  double min_reversion;
};

inline constexpr std::size_t kPositivityGridPoints = 10001;

// Throws ValidationError naming the violated invariant; returns the problem unchanged otherwise.
ProblemSpec validate_problem(const ProblemSpec& raw);

DerivedConstants derived_constants(const ProblemSpec& p);

PositivityMargins positivity_margins(const ProblemSpec& p,
                                     std::size_t grid_points = kPositivityGridPoints);

// Uniform grid t_i = T i / n, i = 0..n.
double grid_time(double horizon, std::size_t n, std::size_t i);

}  // namespace achedge
