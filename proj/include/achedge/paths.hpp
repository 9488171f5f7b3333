#pragma once

#include <cstddef>
#include <vector>

namespace achedge {

// Price observed at the n+1 nodes of a uniform grid on [0, T].
struct PricePath {
  std::vector<double> grid;
  std::vector<double> prices;

  std::size_t n_steps() const { return grid.empty() ? 0 : grid.size() - 1; }
};

// Piecewise-constant trading rate phi[i] on [t_i, t_{i+1}) and the resulting
// position at the nodes.
struct StrategyPath {
  std::vector<double> grid;
  std::vector<double> phi;
  std::vector<double> position;

  std::size_t n_steps() const { return phi.size(); }
};

std::vector<double> uniform_grid(double horizon, std::size_t n_steps);

// Throws std::invalid_argument unless grid is uniform on [0, horizon].
void require_uniform_grid(const std::vector<double>& grid, double horizon);

}  // namespace achedge
