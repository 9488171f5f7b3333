#pragma once

// Pieces shared by the parallel kernels and the serial reference implementations.

#include <cstddef>
#include <span>
#include <vector>

#include "achedge/simulate.hpp"

namespace achedge::detail {

void validate_mc_config(const McConfig& cfg);

// Throws McOverflowError for the first path whose exponent is not finite.
McEstimate reduce_certainty_equivalent(const ProblemSpec& p, const McConfig& cfg,
                                       std::span<const PathOutcome> outcomes);

SlopeEstimate paired_slope(std::span<const double> y_plus, std::span<const double> y_minus,
                           double eps, double alpha);

// psi with its last entry replaced by minus the sum of the others: the effective
// direction once the final step re-liquidates.
std::vector<double> effective_direction(const Perturbation& psi);

void validate_source(const StrategySource& source, const ProblemSpec& p, std::size_t n_steps);

GradientCheck assemble_gradient(std::vector<SlopeEstimate> ladder);

}  // namespace achedge::detail
