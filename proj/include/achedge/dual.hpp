#pragma once

// Dual side of the hedging problem under Bachelier dynamics. The optimal dual pair is
// parameterized by deterministic trajectories: nu (drift of S under the dual measure)
// solves the variational problem of i_instance, and for each s the kernel l(., s)
// solves the one of j_instance(s). The dual value is I* + int_0^T J*_s ds.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "achedge/core_model.hpp"
#include "achedge/variational.hpp"

namespace achedge {

VariationalInstance i_instance(const ProblemSpec& p);

// Horizon T - s, unit price and volatility, no drift or position, claim coefficient
// kappa sigma^2 and impact lambda / sigma^2 (which keeps rho unchanged).
VariationalInstance j_instance(const ProblemSpec& p, double s);

// Optimal J_s for s in [0, T]; at s = T (and for horizons below the degenerate
// threshold) the zero-horizon limit kappa sigma^2.
double j_star(const ProblemSpec& p, double s);

struct QuadConfig {
  std::size_t nodes = 201;  // composite Simpson; (nodes - 1) % 4 == 0
  double tolerance = 1e-6;  // absolute bound on quad_error_estimate
};

struct DualValueReport {
  double i_star;
  double j_integral;
  double total;
  std::size_t quad_nodes;
  double quad_error_estimate;  // |Simpson(nodes) - Simpson((nodes + 1) / 2)|
};

DualValueReport dual_value(const ProblemSpec& p, const QuadConfig& quad = {});

struct JProfilePoint {
  double s;
  double j_star;
};
std::vector<JProfilePoint> j_profile(const ProblemSpec& p, std::size_t nodes);

double m0_hat(const ProblemSpec& p);

double gamma_hat(const ProblemSpec& p, double s);

// Dual optimizer tabulated on a uniform grid of n steps.
struct DualKernel {
  std::size_t n_steps;
  double dt;
  double m0_hat;
  std::vector<double> nu;         // nu(t_i), i = 0..n
  std::vector<double> gamma_hat;  // gamma_hat(s_j), j = 0..n-1
  // l(t_i, s_j) for j < i <= n, stored row-wise by j: kernel[j][i - j - 1].
  std::vector<std::vector<double>> kernel;

  double l(std::size_t i, std::size_t j) const { return kernel[j][i - j - 1]; }
};

DualKernel dual_kernel(const ProblemSpec& p, std::size_t n_steps);

struct MartingaleResidual {
  std::size_t n_steps;
  double max_residual;       // sup over grid points with t <= (1 - terminal_exclusion) T
  double max_residual_full;  // sup over every grid point t < T
};

inline constexpr double kDefaultTerminalExclusion = 0.01;

// dW_j = sqrt(dt) Z(seed, 0, j), j < n_steps.
std::vector<double> brownian_increments(double horizon, std::size_t n_steps, std::uint64_t seed);

// Sums consecutive groups of `factor` increments (same Brownian path, coarser grid).
std::vector<double> coarsen_increments(std::span<const double> dw, std::size_t factor);

// Builds S by the stochastic convolution with the dual kernel and M from gamma_hat
// along one Brownian path under the dual measure, integrates the feedback law along
// that S, and compares it with (M - S) / Lambda at every grid point.
MartingaleResidual verify_martingale_structure(const ProblemSpec& p, const DualKernel& kernel,
                                               std::span<const double> dw,
                                               double terminal_exclusion = kDefaultTerminalExclusion);

MartingaleResidual verify_martingale_structure(const ProblemSpec& p, std::uint64_t seed,
                                               std::size_t n_steps,
                                               double terminal_exclusion = kDefaultTerminalExclusion);


// Residuals on one Brownian path at n and 2n steps; the n-step increments are pairwise
// sums of the 2n-step ones. `fine` must have twice the steps of `coarse`.
struct RefinementStudy {
  std::uint64_t seed;
  double coarse;
  double fine;
  double ratio;  // coarse / fine
};
RefinementStudy martingale_refinement(const ProblemSpec& p, const DualKernel& coarse,
                                      const DualKernel& fine, std::uint64_t seed,
                                      double terminal_exclusion = kDefaultTerminalExclusion);

}  // namespace achedge
