#pragma once

// Deterministic trajectory problem over continuous delta: [0,T] -> R with delta(0) = 0:
//
//   maximize  kappa (s0 + delta_T)^2 - 1/(2 alpha sigma^2) int (delta' - mu)^2
//             + 1/(2 lambda) ( (phi0 lambda - int delta)^2 / T - int delta^2 )
//
// solved in closed form (hyperbolic-sine profile) and, independently, by a dense
// discretization over piecewise-linear trajectories.

#include <cstddef>
#include <vector>

namespace achedge {

struct VariationalInstance {
  double kappa = 0.0;
  double s0 = 0.0;
  double mu = 0.0;
  double phi0 = 0.0;
  double sigma = 1.0;
  double alpha = 1.0;
  double lambda = 1.0;
  double horizon = 1.0;

  double rho() const { return alpha * sigma * sigma / lambda; }
};

// Reduced objective A x^2 + B y^2 + 2 C x y + eta x + theta y + constant over
// x = delta_T and y = int delta.
struct QuadCoefficients {
  double a_coef;
  double b_coef;
  double c_coef;
  double eta;
  double theta;
  double ab_minus_c2;  // from the factored expression; see coefficients()
  double constant;     // kappa s0^2 + phi0^2 lambda / (2T) - mu^2 T / (2 alpha sigma^2)
};

struct VariationalSolution {
  double c1;
  double c2;
  double c3;
  double x_bar;  // delta_T
  double y_bar;  // int_0^T delta
  double value;
  double mean;   // y_bar / T
};

struct DiscreteTrajectory {
  std::vector<double> grid;
  std::vector<double> values;
  double objective_value = 0.0;
};

inline constexpr double kMinScaledHorizon = 1e-6;

void validate_instance(const VariationalInstance& inst);

QuadCoefficients coefficients(const VariationalInstance& inst);

struct Endpoints {
  double x_bar;
  double y_bar;
};
Endpoints optimal_endpoints(const QuadCoefficients& q);

VariationalSolution solve_closed_form(const VariationalInstance& inst);

double evaluate_delta(const VariationalSolution& sol, const VariationalInstance& inst, double t);

// Closed-form minimum of int H(delta', delta) over trajectories with delta_T = x and
// int delta = y, H(u, v) = (u - mu)^2 / (2 alpha sigma^2) + v^2 / (2 lambda).
double constrained_min_value(const VariationalInstance& inst, double x, double y);

// Discrete objective of a piecewise-linear trajectory, integrated exactly per interval.
double objective(const VariationalInstance& inst, const DiscreteTrajectory& traj);

// Maximizes the discrete objective over n-interval piecewise-linear trajectories.
// Dense: intended for n up to a few thousand.
DiscreteTrajectory solve_discretized(const VariationalInstance& inst, std::size_t n);

double mean_of_optimal_delta(const VariationalInstance& inst);

}  // namespace achedge
