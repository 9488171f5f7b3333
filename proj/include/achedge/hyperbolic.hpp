#pragma once

// Overflow- and cancellation-safe hyperbolic building blocks shared by the closed forms.

#include <cmath>

namespace achedge::hyp {

inline double coth(double x) { return 1.0 / std::tanh(x); }

// x - 2 tanh(x/2) for x >= 0; series below 0.1 where the subtraction cancels.
inline double x_minus_2tanh_half(double x) {
  if (x < 0.1) {
    const double x2 = x * x;
    return x * x2 *
           (1.0 / 12.0 +
            x2 * (-1.0 / 120.0 +
                  x2 * (17.0 / 20160.0 + x2 * (-31.0 / 362880.0 + x2 * 691.0 / 79833600.0))));
  }
  return x - 2.0 * std::tanh(0.5 * x);
}

// sinh(a) / sinh(b) for 0 <= a <= b, b > 0.
inline double sinh_ratio(double a, double b) {
  return std::exp(a - b) * std::expm1(-2.0 * a) / std::expm1(-2.0 * b);
}

// 1 - cosh(u - b/2) / cosh(b/2) with u in [0, b]; equals
// 2 sinh(u/2) sinh((b-u)/2) / cosh(b/2) written without overflow.
inline double bump(double u, double b) {
  return std::expm1(-u) * std::expm1(-(b - u)) / (1.0 + std::exp(-b));
}

}  // namespace achedge::hyp
