#include "achedge/paths.hpp"

#include <cmath>
#include <stdexcept>

#include "achedge/core_model.hpp"

namespace achedge {

std::vector<double> uniform_grid(double horizon, std::size_t n_steps) {
  std::vector<double> g(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) g[i] = grid_time(horizon, n_steps, i);
  return g;
}

void require_uniform_grid(const std::vector<double>& grid, double horizon) {
  if (grid.size() < 2) throw std::invalid_argument("grid needs at least two nodes");
  const std::size_t n = grid.size() - 1;
  const double tol = 1e-12 * horizon;
  for (std::size_t i = 0; i <= n; ++i) {
    if (std::abs(grid[i] - grid_time(horizon, n, i)) > tol) {
      throw std::invalid_argument("grid is not uniform on [0, T]");
    }
  }
}

}  // namespace achedge
