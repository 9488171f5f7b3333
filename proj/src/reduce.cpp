#include "achedge/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace achedge {

namespace {

constexpr std::size_t kBlock = 1024;

double neumaier(std::span<const double> v) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

double pairwise(std::span<const double> v) {
  if (v.size() <= 2) return v.size() == 2 ? v[0] + v[1] : (v.empty() ? 0.0 : v[0]);
  const std::size_t half = v.size() / 2;
  return pairwise(v.first(half)) + pairwise(v.subspan(half));
}

}  // namespace

double deterministic_sum(std::span<const double> values) {
  std::vector<double> blocks;
  blocks.reserve(values.size() / kBlock + 1);
  for (std::size_t b = 0; b < values.size(); b += kBlock) {
    blocks.push_back(neumaier(values.subspan(b, std::min(kBlock, values.size() - b))));
  }
  return pairwise(blocks);
}

LogMeanExp log_mean_exp(std::span<const double> y, double alpha) {
  const std::size_t n = y.size();
  if (n < 2) throw std::invalid_argument("log_mean_exp: need at least two samples");
  const double shift = *std::max_element(y.begin(), y.end());
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = std::exp(y[k] - shift);
  const double mean = deterministic_sum(w) / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double d = w[k] - mean;
    w[k] = d * d;
  }
  const double var = deterministic_sum(w) / static_cast<double>(n - 1);
  return {(shift + std::log(mean)) / alpha,
          std::sqrt(var / static_cast<double>(n)) / mean / alpha};
}

}  // namespace achedge
