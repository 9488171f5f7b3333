#pragma once

#include <cstddef>
#include <vector>

#include "achedge/core_model.hpp"
#include "achedge/paths.hpp"

namespace achedge {

struct FeedbackCoefficients {
  double t;
  double tanh_half;  // tanh(sqrt(rho)(T - t)/2)
  double coth_full;  // coth(sqrt(rho)(T - t))
  double denom;      // 1/sqrt(rho) - 4 kappa Lambda tanh_half
};

FeedbackCoefficients feedback_coefficients(const ProblemSpec& p, double t);

// Optimal trading rate at time t < T given price s and current position.
double feedback_rate(const ProblemSpec& p, double t, double s, double phi_pos);

// Level the feedback law mean-reverts the position towards.
double target_position(const ProblemSpec& p, double t, double s);

double initial_rate(const ProblemSpec& p);

// The feedback law on a uniform grid in affine form
//   rate_i = price_gain[i] * s + offset[i] - reversion[i] * position
// for steps i = 0..n-2; the last step is the forced liquidation.
struct FeedbackSchedule {
  double dt;
  std::vector<double> price_gain;
  std::vector<double> offset;
  std::vector<double> reversion;

  std::size_t n_steps() const { return price_gain.size() + 1; }
  double rate(std::size_t i, double s, double position) const {
    return price_gain[i] * s + offset[i] - reversion[i] * position;
  }
};

FeedbackSchedule feedback_schedule(const ProblemSpec& p, std::size_t n_steps);

inline constexpr std::size_t kMinClosedLoopSteps = 16;

// Explicit closed-loop stepping along the path, left-endpoint rates, with the final
// interval forced to liquidate exactly.
StrategyPath integrate_closed_loop(const ProblemSpec& p, const PricePath& path);
StrategyPath integrate_closed_loop(const ProblemSpec& p, const FeedbackSchedule& schedule,
                                   const PricePath& path);

}  // namespace achedge
