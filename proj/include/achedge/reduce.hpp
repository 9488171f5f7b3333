#pragma once

#include <cstddef>
#include <span>

namespace achedge {

// Compensated (Neumaier) sum over fixed 1024-element blocks, block sums combined
// pairwise. The result depends only on the input order, never on thread count.
double deterministic_sum(std::span<const double> values);

// (1/alpha) log mean exp(y) with its delta-method standard error, shifted by max(y).
struct LogMeanExp {
  double value;
  double std_err;
};
LogMeanExp log_mean_exp(std::span<const double> y, double alpha);

}  // namespace achedge
