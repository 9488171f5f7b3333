#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "achedge/core_model.hpp"
#include "achedge/paths.hpp"

namespace achedge {

// Bachelier path with exact Gaussian increments; increment i of path `path_index`
// is standard_normal(seed, path_index, i).
PricePath sample_path(const ProblemSpec& p, std::size_t n_steps, std::uint64_t seed,
                      std::uint64_t path_index);

// Terminal wealth -phi0 s0 - sum phi_i S_i dt - (Lambda/2) sum phi_i^2 dt.
double wealth(const ProblemSpec& p, const PricePath& path, const StrategyPath& strat);

// -phi0 s0 + (1/(2 Lambda)) sum S_i^2 dt: no strategy can beat it on this path.
double wealth_upper_bound(const ProblemSpec& p, const PricePath& path);

double claim_payoff(const ProblemSpec& p, const PricePath& path);

// Rate direction on the n intervals of the grid; must integrate to zero so that the
// liquidation constraint survives the perturbation.
struct Perturbation {
  std::vector<double> psi;
};

void validate_perturbation(const Perturbation& psi, double dt);

// `count` random directions sum_k a_k cos(k pi t / T), k = 1..modes, sampled at interval
// midpoints with the mean removed; a_k ~ N(0, 1/k^2) from stream `1 + direction`.
std::vector<Perturbation> smooth_directions(std::size_t n_steps, std::size_t count,
                                            std::uint64_t seed, std::size_t modes = 4);

// phi + eps psi on every interval but the last, which again liquidates exactly.
StrategyPath perturb(const StrategyPath& strat, const Perturbation& psi, double eps);

// The strategy run on each simulated path.
struct StrategySource {
  enum class Kind { kFeedback, kFixed };

  Kind kind = Kind::kFeedback;
  std::vector<double> fixed_rates;  // kFixed: one rate per interval, must liquidate
  Perturbation perturbation;        // empty psi: unperturbed
  double eps = 0.0;

  static StrategySource feedback() { return {}; }
  static StrategySource fixed(std::vector<double> rates);
  StrategySource perturbed(Perturbation psi, double eps) const;
};

// Rates `base_rate` on [0, T - dt) and whatever liquidates the rest on the last interval.
std::vector<double> forced_liquidation_rates(const ProblemSpec& p, std::size_t n_steps,
                                             double base_rate = 0.0);

// Strategy of `source` along one path (closed loop, or fixed, then perturbed).
StrategyPath realize_strategy(const ProblemSpec& p, const StrategySource& source,
                              const PricePath& path);

struct McConfig {
  std::size_t n_paths = 100000;
  std::size_t n_steps = 2000;
  std::uint64_t seed = 0;
};

struct McEstimate {
  double value;
  double std_err;
  std::size_t n_paths;
  std::size_t n_steps;
  std::uint64_t seed;
};

struct PathOutcome {
  double claim;
  double wealth;
};

// (1/alpha) log E exp(alpha (claim - wealth)). OpenMP over paths; the reduction is
// fixed-shape, so the estimate is bit-identical for any thread count.
McEstimate mc_certainty_equivalent(const ProblemSpec& p, const McConfig& cfg,
                                   const StrategySource& source,
                                   std::vector<PathOutcome>* per_path = nullptr);

// Single-threaded reference built from sample_path / realize_strategy / wealth.
McEstimate mc_certainty_equivalent_reference(const ProblemSpec& p, const McConfig& cfg,
                                             const StrategySource& source,
                                             std::vector<PathOutcome>* per_path = nullptr);

struct SlopeEstimate {
  double eps;
  double slope;
  double std_err;
};

struct GradientCheck {
  std::vector<SlopeEstimate> ladder;  // one entry per eps, in the order given
  double slope;                       // entry with the smallest eps
  double std_err;
};

// Central difference (CE(+eps) - CE(-eps)) / (2 eps) of the certainty equivalent of
// `base` perturbed along each direction, all evaluated on common random numbers.
std::vector<GradientCheck> gradient_check(const ProblemSpec& p, const StrategySource& base,
                                          const std::vector<Perturbation>& directions,
                                          const std::vector<double>& eps_ladder,
                                          const McConfig& cfg);

std::vector<GradientCheck> gradient_check_reference(const ProblemSpec& p,
                                                    const StrategySource& base,
                                                    const std::vector<Perturbation>& directions,
                                                    const std::vector<double>& eps_ladder,
                                                    const McConfig& cfg);

}  // namespace achedge
