#include "achedge/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "achedge/errors.hpp"
#include "achedge/reduce.hpp"
#include "achedge/rng.hpp"
#include "achedge/strategy.hpp"
#include "mc_internal.hpp"

namespace achedge {

PricePath sample_path(const ProblemSpec& p, std::size_t n_steps, std::uint64_t seed,
                      std::uint64_t path_index) {
  if (n_steps < 1) throw std::invalid_argument("sample_path: n_steps must be >= 1");
  const double dt = p.t_horizon / static_cast<double>(n_steps);
  const double drift = p.mu * dt;
  const double vol = p.sigma * std::sqrt(dt);
  PricePath path;
  path.grid = uniform_grid(p.t_horizon, n_steps);
  path.prices.resize(n_steps + 1);
  path.prices[0] = p.s0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    path.prices[i + 1] = path.prices[i] + (drift + vol * standard_normal(seed, path_index, i));
  }
  return path;
}

double wealth(const ProblemSpec& p, const PricePath& path, const StrategyPath& strat) {
  const std::size_t n = strat.n_steps();
  if (path.n_steps() != n || path.prices.size() != n + 1) {
    throw std::invalid_argument("wealth: price path and strategy grids differ");
  }
  const double dt = p.t_horizon / static_cast<double>(n);
  double acc_ps = 0.0;
  double acc_pp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc_ps += strat.phi[i] * path.prices[i];
    acc_pp += strat.phi[i] * strat.phi[i];
  }
  return -p.phi0 * p.s0 - dt * acc_ps - 0.5 * p.lambda_impact * dt * acc_pp;
}

double wealth_upper_bound(const ProblemSpec& p, const PricePath& path) {
  const std::size_t n = path.n_steps();
  const double dt = p.t_horizon / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += path.prices[i] * path.prices[i];
  return -p.phi0 * p.s0 + acc * dt / (2.0 * p.lambda_impact);
}

double claim_payoff(const ProblemSpec& p, const PricePath& path) {
  const double s = path.prices.back();
  return p.kappa * s * s;
}

void validate_perturbation(const Perturbation& psi, double dt) {
  double sum = 0.0;
  double mass = 0.0;
  for (double v : psi.psi) {
    if (!std::isfinite(v)) throw std::invalid_argument("perturbation values must be finite");
    sum += v * dt;
    mass += std::abs(v) * dt;
  }
  if (std::abs(sum) > 1e-12 * (1.0 + mass)) {
    throw std::invalid_argument("perturbation must integrate to zero over [0, T]");
  }
}

std::vector<Perturbation> smooth_directions(std::size_t n_steps, std::size_t count,
                                            std::uint64_t seed, std::size_t modes) {
  if (n_steps == 0 || modes == 0) throw std::invalid_argument("smooth_directions: empty grid or basis");
  const double pi = std::acos(-1.0);
  std::vector<Perturbation> out(count);
  for (std::size_t d = 0; d < count; ++d) {
    std::vector<double> a(modes);
    for (std::size_t k = 0; k < modes; ++k) {
      a[k] = standard_normal(seed, 1 + d, k) / static_cast<double>(k + 1);
    }
    auto& psi = out[d].psi;
    psi.assign(n_steps, 0.0);
    for (std::size_t i = 0; i < n_steps; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n_steps);
      for (std::size_t k = 0; k < modes; ++k) {
        psi[i] += a[k] * std::cos(static_cast<double>(k + 1) * pi * u);
      }
    }
    const double mean = deterministic_sum(psi) / static_cast<double>(n_steps);
    for (double& v : psi) v -= mean;
  }
  return out;
}

StrategyPath perturb(const StrategyPath& strat, const Perturbation& psi, double eps) {
  const std::size_t n = strat.n_steps();
  if (psi.psi.size() != n) throw std::invalid_argument("perturb: direction length mismatch");
  const double dt = strat.grid.back() / static_cast<double>(n);
  validate_perturbation(psi, dt);
  StrategyPath out = strat;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.phi[i] = strat.phi[i] + eps * psi.psi[i];
    out.position[i + 1] = out.position[i] + out.phi[i] * dt;
  }
  out.phi[n - 1] = -out.position[n - 1] / dt;
  out.position[n] = 0.0;
  return out;
}

StrategySource StrategySource::fixed(std::vector<double> rates) {
  StrategySource s;
  s.kind = Kind::kFixed;
  s.fixed_rates = std::move(rates);
  return s;
}

StrategySource StrategySource::perturbed(Perturbation psi, double eps_) const {
  StrategySource s = *this;
  s.perturbation = std::move(psi);
  s.eps = eps_;
  return s;
}

std::vector<double> forced_liquidation_rates(const ProblemSpec& p, std::size_t n_steps,
                                             double base_rate) {
  if (n_steps < 2) throw std::invalid_argument("forced_liquidation_rates: need >= 2 steps");
  const double dt = p.t_horizon / static_cast<double>(n_steps);
  std::vector<double> rates(n_steps, base_rate);
  double pos = p.phi0;
  for (std::size_t i = 0; i + 1 < n_steps; ++i) pos += rates[i] * dt;
  rates[n_steps - 1] = -pos / dt;
  return rates;
}

StrategyPath realize_strategy(const ProblemSpec& p, const StrategySource& source,
                              const PricePath& path) {
  const std::size_t n = path.n_steps();
  detail::validate_source(source, p, n);
  StrategyPath strat;
  if (source.kind == StrategySource::Kind::kFeedback) {
    strat = integrate_closed_loop(p, path);
  } else {
    const double dt = p.t_horizon / static_cast<double>(n);
    strat.grid = path.grid;
    strat.phi = source.fixed_rates;
    strat.position.resize(n + 1);
    strat.position[0] = p.phi0;
    for (std::size_t i = 0; i < n; ++i) {
      strat.position[i + 1] = strat.position[i] + strat.phi[i] * dt;
    }
    strat.position[n] = 0.0;
  }
  if (!source.perturbation.psi.empty()) strat = perturb(strat, source.perturbation, source.eps);
  return strat;
}

namespace detail {

void validate_mc_config(const McConfig& cfg) {
  if (cfg.n_paths < 2) throw std::invalid_argument("n_paths must be >= 2");
  if (cfg.n_steps < kMinClosedLoopSteps) throw std::invalid_argument("n_steps must be >= 16");
}

void validate_source(const StrategySource& source, const ProblemSpec& p, std::size_t n_steps) {
  const double dt = p.t_horizon / static_cast<double>(n_steps);
  if (source.kind == StrategySource::Kind::kFixed) {
    if (source.fixed_rates.size() != n_steps) {
      throw std::invalid_argument("fixed strategy has the wrong number of rates");
    }
    double pos = p.phi0;
    for (double r : source.fixed_rates) pos += r * dt;
    if (std::abs(pos) > 1e-9 * (1.0 + std::abs(p.phi0))) {
      throw std::invalid_argument("fixed strategy does not liquidate the position");
    }
  }
  if (!source.perturbation.psi.empty()) {
    if (source.perturbation.psi.size() != n_steps) {
      throw std::invalid_argument("perturbation has the wrong number of rates");
    }
    validate_perturbation(source.perturbation, dt);
  }
}

McEstimate reduce_certainty_equivalent(const ProblemSpec& p, const McConfig& cfg,
                                       std::span<const PathOutcome> outcomes) {
  std::vector<double> y(outcomes.size());
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    y[k] = p.alpha * (outcomes[k].claim - outcomes[k].wealth);
    if (!std::isfinite(y[k])) {
      throw McOverflowError(k, "exponent alpha (claim - wealth) is not finite on path " +
                                   std::to_string(k) + " (kappa too close to its bound?)");
    }
  }
  const LogMeanExp lme = log_mean_exp(y, p.alpha);
  return {lme.value, lme.std_err, cfg.n_paths, cfg.n_steps, cfg.seed};
}

SlopeEstimate paired_slope(std::span<const double> y_plus, std::span<const double> y_minus,
                           double eps, double alpha) {
  const std::size_t n = y_plus.size();
  const double shift = std::max(*std::max_element(y_plus.begin(), y_plus.end()),
                                *std::max_element(y_minus.begin(), y_minus.end()));
  std::vector<double> wp(n), wm(n), tmp(n);
  for (std::size_t k = 0; k < n; ++k) {
    wp[k] = std::exp(y_plus[k] - shift);
    wm[k] = std::exp(y_minus[k] - shift);
  }
  const double nn = static_cast<double>(n);
  const double mp = deterministic_sum(wp) / nn;
  const double mm = deterministic_sum(wm) / nn;
  auto central = [&](const std::vector<double>& a, double ma, const std::vector<double>& b,
                     double mb) {
    for (std::size_t k = 0; k < n; ++k) tmp[k] = (a[k] - ma) * (b[k] - mb);
    return deterministic_sum(tmp) / (nn - 1.0);
  };
  const double vp = central(wp, mp, wp, mp);
  const double vm = central(wm, mm, wm, mm);
  const double cov = central(wp, mp, wm, mm);
  const double scale = 1.0 / (2.0 * eps * alpha);
  const double var = (vp / (mp * mp) + vm / (mm * mm) - 2.0 * cov / (mp * mm)) / nn;
  return {eps, scale * (std::log(mp) - std::log(mm)), scale * std::sqrt(std::max(var, 0.0))};
}

std::vector<double> effective_direction(const Perturbation& psi) {
  std::vector<double> eff = psi.psi;
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < eff.size(); ++i) head += eff[i];
  eff.back() = -head;
  return eff;
}

GradientCheck assemble_gradient(std::vector<SlopeEstimate> ladder) {
  const auto smallest = std::min_element(
      ladder.begin(), ladder.end(),
      [](const SlopeEstimate& a, const SlopeEstimate& b) { return a.eps < b.eps; });
  GradientCheck g{std::move(ladder), 0.0, 0.0};
  if (smallest != g.ladder.end()) {
    g.slope = smallest->slope;
    g.std_err = smallest->std_err;
  }
  return g;
}

}  // namespace detail

namespace {

// One simulated path with the strategy generated on the fly; never stores the path.
class FusedPath {
 public:
  FusedPath(const ProblemSpec& p, const StrategySource& source, std::size_t n_steps)
      : p_(p), source_(source), n_(n_steps) {
    dt_ = p.t_horizon / static_cast<double>(n_);
    drift_ = p.mu * dt_;
    vol_ = p.sigma * std::sqrt(dt_);
    if (source.kind == StrategySource::Kind::kFeedback) schedule_ = feedback_schedule(p, n_);
  }

  // hook(i, rate, price) sees every interval before the price moves on.
  template <class Hook>
  PathOutcome run(std::uint64_t seed, std::uint64_t path_index, Hook&& hook) const {
    const bool feedback = source_.kind == StrategySource::Kind::kFeedback;
    const bool perturbed = !source_.perturbation.psi.empty();
    const double* psi = perturbed ? source_.perturbation.psi.data() : nullptr;
    double s = p_.s0;
    double pos = p_.phi0;
    double pos_run = p_.phi0;
    double acc_ps = 0.0;
    double acc_pp = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double r;
      if (i + 1 < n_) {
        const double base = feedback ? schedule_.rate(i, s, pos) : source_.fixed_rates[i];
        pos = pos + base * dt_;
        r = perturbed ? base + source_.eps * psi[i] : base;
      } else if (feedback || perturbed) {
        r = -pos_run / dt_;
      } else {
        r = source_.fixed_rates[i];
      }
      pos_run = pos_run + r * dt_;
      hook(i, r, s);
      acc_ps += r * s;
      acc_pp += r * r;
      s = s + (drift_ + vol_ * standard_normal(seed, path_index, i));
    }
    const double w = -p_.phi0 * p_.s0 - dt_ * acc_ps - 0.5 * p_.lambda_impact * dt_ * acc_pp;
    return {p_.kappa * s * s, w};
  }

  double dt() const { return dt_; }

 private:
  const ProblemSpec& p_;
  const StrategySource& source_;
  std::size_t n_;
  double dt_, drift_, vol_;
  FeedbackSchedule schedule_{};
};

}  // namespace

McEstimate mc_certainty_equivalent(const ProblemSpec& p, const McConfig& cfg,
                                   const StrategySource& source,
                                   std::vector<PathOutcome>* per_path) {
  detail::validate_mc_config(cfg);
  detail::validate_source(source, p, cfg.n_steps);
  const FusedPath kernel(p, source, cfg.n_steps);
  std::vector<PathOutcome> outcomes(cfg.n_paths);
  const auto n_paths = static_cast<std::int64_t>(cfg.n_paths);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n_paths; ++k) {
    outcomes[static_cast<std::size_t>(k)] =
        kernel.run(cfg.seed, static_cast<std::uint64_t>(k), [](std::size_t, double, double) {});
  }
  const McEstimate est = detail::reduce_certainty_equivalent(p, cfg, outcomes);
  if (per_path) *per_path = std::move(outcomes);
  return est;
}

std::vector<GradientCheck> gradient_check(const ProblemSpec& p, const StrategySource& base,
                                          const std::vector<Perturbation>& directions,
                                          const std::vector<double>& eps_ladder,
                                          const McConfig& cfg) {
  detail::validate_mc_config(cfg);
  detail::validate_source(base, p, cfg.n_steps);
  if (eps_ladder.empty()) throw std::invalid_argument("gradient_check: empty eps ladder");
  for (double e : eps_ladder) {
    if (!(e > 0.0)) throw std::invalid_argument("gradient_check: eps must be > 0");
  }
  const std::size_t n = cfg.n_steps;
  const std::size_t n_dir = directions.size();
  std::vector<std::vector<double>> eff(n_dir);
  std::vector<double> eff_sq(n_dir, 0.0);
  for (std::size_t d = 0; d < n_dir; ++d) {
    if (directions[d].psi.size() != n) {
      throw std::invalid_argument("gradient_check: direction length mismatch");
    }
    validate_perturbation(directions[d], p.t_horizon / static_cast<double>(n));
    eff[d] = detail::effective_direction(directions[d]);
    for (double v : eff[d]) eff_sq[d] += v * v;
  }

  const FusedPath kernel(p, base, n);
  const double dt = kernel.dt();
  // Per path: claim, wealth, and per direction sum psi S and sum psi phi.
  const std::size_t stride = 2 + 2 * n_dir;
  std::vector<double> stats(cfg.n_paths * stride);
  const auto n_paths = static_cast<std::int64_t>(cfg.n_paths);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n_paths; ++k) {
    double* row = stats.data() + static_cast<std::size_t>(k) * stride;
    double* acc = row + 2;
    std::fill(acc, acc + 2 * n_dir, 0.0);
    const PathOutcome o =
        kernel.run(cfg.seed, static_cast<std::uint64_t>(k), [&](std::size_t i, double r, double s) {
          for (std::size_t d = 0; d < n_dir; ++d) {
            acc[2 * d] += eff[d][i] * s;
            acc[2 * d + 1] += eff[d][i] * r;
          }
        });
    row[0] = o.claim;
    row[1] = o.wealth;
  }

  std::vector<GradientCheck> out;
  out.reserve(n_dir);
  std::vector<double> yp(cfg.n_paths), ym(cfg.n_paths);
  for (std::size_t d = 0; d < n_dir; ++d) {
    std::vector<SlopeEstimate> ladder;
    for (double e : eps_ladder) {
      for (std::size_t k = 0; k < cfg.n_paths; ++k) {
        const double* row = stats.data() + k * stride;
        const double lin = dt * row[2 + 2 * d];
        const double cross = p.lambda_impact * dt * row[3 + 2 * d];
        const double quad = 0.5 * p.lambda_impact * dt * eff_sq[d] * e * e;
        yp[k] = p.alpha * (row[0] - (row[1] - e * lin - e * cross - quad));
        ym[k] = p.alpha * (row[0] - (row[1] + e * lin + e * cross - quad));
        if (!std::isfinite(yp[k]) || !std::isfinite(ym[k])) {
          throw McOverflowError(k, "gradient_check: non-finite exponent on path " +
                                       std::to_string(k));
        }
      }
      ladder.push_back(detail::paired_slope(yp, ym, e, p.alpha));
    }
    out.push_back(detail::assemble_gradient(std::move(ladder)));
  }
  return out;
}

}  // namespace achedge
