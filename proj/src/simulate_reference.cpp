// Serial reference implementations of the Monte Carlo kernels. They compose the public
// per-path operations and are kept to cross-check the fused OpenMP kernels.

#include <cmath>
#include <stdexcept>

#include "achedge/simulate.hpp"
#include "mc_internal.hpp"

namespace achedge {

McEstimate mc_certainty_equivalent_reference(const ProblemSpec& p, const McConfig& cfg,
                                             const StrategySource& source,
                                             std::vector<PathOutcome>* per_path) {
  detail::validate_mc_config(cfg);
  std::vector<PathOutcome> outcomes(cfg.n_paths);
  for (std::size_t k = 0; k < cfg.n_paths; ++k) {
    const PricePath path = sample_path(p, cfg.n_steps, cfg.seed, k);
    const StrategyPath strat = realize_strategy(p, source, path);
    outcomes[k] = {claim_payoff(p, path), wealth(p, path, strat)};
  }
  const McEstimate est = detail::reduce_certainty_equivalent(p, cfg, outcomes);
  if (per_path) *per_path = std::move(outcomes);
  return est;
}

std::vector<GradientCheck> gradient_check_reference(const ProblemSpec& p,
                                                    const StrategySource& base,
                                                    const std::vector<Perturbation>& directions,
                                                    const std::vector<double>& eps_ladder,
                                                    const McConfig& cfg) {
  detail::validate_mc_config(cfg);
  const std::size_t n_dir = directions.size();
  const std::size_t n_eps = eps_ladder.size();
  // y[(d * n_eps + e) * 2 + sign][path]
  std::vector<std::vector<double>> y(n_dir * n_eps * 2, std::vector<double>(cfg.n_paths));
  for (std::size_t k = 0; k < cfg.n_paths; ++k) {
    const PricePath path = sample_path(p, cfg.n_steps, cfg.seed, k);
    const StrategyPath strat = realize_strategy(p, base, path);
    const double claim = claim_payoff(p, path);
    for (std::size_t d = 0; d < n_dir; ++d) {
      for (std::size_t e = 0; e < n_eps; ++e) {
        const double eps = eps_ladder[e];
        const double wp = wealth(p, path, perturb(strat, directions[d], eps));
        const double wm = wealth(p, path, perturb(strat, directions[d], -eps));
        y[(d * n_eps + e) * 2][k] = p.alpha * (claim - wp);
        y[(d * n_eps + e) * 2 + 1][k] = p.alpha * (claim - wm);
      }
    }
  }
  std::vector<GradientCheck> out;
  for (std::size_t d = 0; d < n_dir; ++d) {
    std::vector<SlopeEstimate> ladder;
    for (std::size_t e = 0; e < n_eps; ++e) {
      ladder.push_back(detail::paired_slope(y[(d * n_eps + e) * 2], y[(d * n_eps + e) * 2 + 1],
                                            eps_ladder[e], p.alpha));
    }
    out.push_back(detail::assemble_gradient(std::move(ladder)));
  }
  return out;
}

}  // namespace achedge
