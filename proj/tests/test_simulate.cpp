#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "achedge/reduce.hpp"
#include "achedge/simulate.hpp"
#include "achedge/strategy.hpp"

using namespace achedge;

namespace {

ProblemSpec worked() {
  ProblemSpec p;
  p.kappa = 0.25;
  return p;
}

// Exact certainty equivalent of a deterministic rate schedule when there is no claim:
// the cost is affine in the Gaussian increments.
double exact_deterministic_ce(const ProblemSpec& p, const std::vector<double>& phi) {
  const std::size_t n = phi.size();
  const double dt = p.t_horizon / static_cast<double>(n);
  double mean = p.phi0 * p.s0;
  double impact = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean += phi[i] * (p.s0 + p.mu * dt * static_cast<double>(i)) * dt;
    impact += phi[i] * phi[i] * dt;
  }
  // Coefficient of increment j is dt * sum_{i > j} phi_i.
  double var = 0.0;
  double tail = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    var += tail * tail * dt;
    tail += phi[j] * dt;
  }
  return mean + 0.5 * p.lambda_impact * impact + 0.5 * p.alpha * p.sigma * p.sigma * var;
}

}  // namespace

TEST_CASE("sample_path determinism and shape") {
  const auto p = worked();
  const auto a = sample_path(p, 100, 3, 17);
  const auto b = sample_path(p, 100, 3, 17);
  CHECK(a.prices == b.prices);
  CHECK(a.grid == b.grid);
  CHECK(a.prices.size() == 101);
  CHECK(a.prices.front() == p.s0);
  CHECK(a.grid.back() == p.t_horizon);
  CHECK(sample_path(p, 100, 3, 18).prices != a.prices);
}

TEST_CASE("terminal price moments") {
  ProblemSpec p;
  p.sigma = 2.5;
  p.mu = 0.4;
  p.t_horizon = 2.0;
  const std::size_t n = 100000;
  std::vector<double> x(n), x2(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double d = sample_path(p, 16, 1, k).prices.back() - p.s0 - p.mu * p.t_horizon;
    x[k] = d;
    x2[k] = d * d;
  }
  const double var = p.sigma * p.sigma * p.t_horizon;
  const double m = deterministic_sum(x) / n;
  const double v = deterministic_sum(x2) / n;
  CHECK(std::abs(m) < 4.0 * std::sqrt(var / n));
  CHECK(std::abs(v - var) < 4.0 * var * std::sqrt(2.0 / n));
}

TEST_CASE("wealth arithmetic") {
  ProblemSpec p;
  p.phi0 = 1.0;
  PricePath path{uniform_grid(1.0, 4), std::vector<double>(5, 5.0)};
  p.s0 = 5.0;
  StrategyPath s{path.grid, std::vector<double>(4, -1.0), {1.0, 0.75, 0.5, 0.25, 0.0}};
  CHECK(wealth(p, path, s) == doctest::Approx(-0.5).epsilon(1e-15));

  ProblemSpec q = p;
  q.lambda_impact = 0.0;
  CHECK(wealth(q, path, s) - wealth(p, path, s) == doctest::Approx(0.5).epsilon(1e-15));

  ProblemSpec z;
  StrategyPath flat{path.grid, std::vector<double>(4, 0.0), std::vector<double>(5, 0.0)};
  CHECK(wealth(z, path, flat) == 0.0);
}

TEST_CASE("no strategy beats the pathwise upper bound") {
  ProblemSpec p = worked();
  p.phi0 = 0.5;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto path = sample_path(p, 64, 2, k);
    CHECK(wealth(p, path, integrate_closed_loop(p, path)) <= wealth_upper_bound(p, path));
  }
}

TEST_CASE("claim payoff") {
  ProblemSpec p;
  PricePath path{uniform_grid(1.0, 2), {1.0, 1.5, 2.0}};
  CHECK(claim_payoff(p, path) == 0.0);
  p.kappa = 0.25;
  CHECK(claim_payoff(p, path) == 1.0);
}

TEST_CASE("zero instance has exactly zero certainty equivalent") {
  const auto est = mc_certainty_equivalent(ProblemSpec{}, {1000, 32, 5}, StrategySource::feedback());
  CHECK(est.value == 0.0);
  CHECK(est.std_err == 0.0);
  CHECK(est.n_paths == 1000);
  CHECK(est.n_steps == 32);
  CHECK(est.seed == 5);
}

TEST_CASE("deterministic strategies match the exact Gaussian certainty equivalent") {
  ProblemSpec p;
  p.phi0 = 1.0;
  p.mu = 0.1;
  p.sigma = 0.8;
  p.alpha = 2.0;
  const std::size_t n = 200;
  const McConfig cfg{40000, n, 8};

  SUBCASE("feedback law, which is price independent here") {
    ProblemSpec q = p;
    q.mu = 0.0;
    const auto rates = integrate_closed_loop(q, sample_path(q, n, 0, 0)).phi;
    const auto est = mc_certainty_equivalent(q, cfg, StrategySource::feedback());
    CHECK(std::abs(est.value - exact_deterministic_ce(q, rates)) <= 4.0 * est.std_err);
  }
  SUBCASE("hold then dump") {
    const auto rates = forced_liquidation_rates(p, n, -0.3);
    const auto est = mc_certainty_equivalent(p, cfg, StrategySource::fixed(rates));
    CHECK(std::abs(est.value - exact_deterministic_ce(p, rates)) <= 4.0 * est.std_err);
  }
}

TEST_CASE("pure-liquidation discrete value approaches the continuous one") {
  ProblemSpec p;
  p.phi0 = 1.0;
  const std::size_t n = 2000;
  const auto rates = integrate_closed_loop(p, sample_path(p, n, 0, 0)).phi;
  const double continuous = 0.656517642749665651818;
  CHECK(exact_deterministic_ce(p, rates) == doctest::Approx(0.656393).epsilon(2e-6));
  CHECK(std::abs(exact_deterministic_ce(p, rates) - continuous) < 1.0 / n);
}

TEST_CASE("serial reference and parallel kernel agree bit for bit") {
  ProblemSpec p = worked();
  p.phi0 = 0.7;
  p.mu = 0.05;
  const McConfig cfg{3000, 64, 21};
  for (const auto& src : {StrategySource::feedback(),
                          StrategySource::fixed(forced_liquidation_rates(p, 64, -0.4))}) {
    std::vector<PathOutcome> a, b;
    const auto x = mc_certainty_equivalent(p, cfg, src, &a);
    const auto y = mc_certainty_equivalent_reference(p, cfg, src, &b);
    CHECK(x.value == y.value);
    CHECK(x.std_err == y.std_err);
    REQUIRE(a.size() == b.size());
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
      same = same && a[i].claim == b[i].claim && a[i].wealth == b[i].wealth;
    }
    CHECK(same);
  }
}

TEST_CASE("estimates do not depend on the thread count") {
  ProblemSpec p = worked();
  p.phi0 = -0.4;
  const McConfig cfg{5000, 50, 3};
  const auto dirs = smooth_directions(50, 3, 1);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = mc_certainty_equivalent(p, cfg, StrategySource::feedback());
  const auto ga = gradient_check(p, StrategySource::feedback(), dirs, {0.1, 0.05}, cfg);
  omp_set_num_threads(4);
  const auto b = mc_certainty_equivalent(p, cfg, StrategySource::feedback());
  const auto gb = gradient_check(p, StrategySource::feedback(), dirs, {0.1, 0.05}, cfg);
  omp_set_num_threads(saved);
  CHECK(a.value == b.value);
  CHECK(a.std_err == b.std_err);
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    CHECK(ga[d].slope == gb[d].slope);
    CHECK(ga[d].std_err == gb[d].std_err);
  }
}

TEST_CASE("perturbations") {
  ProblemSpec p = worked();
  p.phi0 = 1.0;
  const auto path = sample_path(p, 40, 0, 0);
  const auto base = integrate_closed_loop(p, path);
  const auto dirs = smooth_directions(40, 2, 0);
  const double dt = 1.0 / 40;

  for (const auto& d : dirs) CHECK_NOTHROW(validate_perturbation(d, dt));
  const auto same = perturb(base, dirs[0], 0.0);
  CHECK(same.phi == base.phi);
  CHECK(same.position == base.position);
  const auto zero = perturb(base, Perturbation{std::vector<double>(40, 0.0)}, 0.7);
  CHECK(zero.phi == base.phi);

  const auto moved = perturb(base, dirs[1], 0.3);
  CHECK(moved.position.back() == 0.0);
  CHECK(moved.phi != base.phi);

  CHECK_THROWS_AS(validate_perturbation(Perturbation{std::vector<double>(40, 1.0)}, dt),
                  std::invalid_argument);
}

TEST_CASE("gradient of a null direction is exactly zero") {
  const auto p = worked();
  const auto g = gradient_check(p, StrategySource::feedback(),
                                {Perturbation{std::vector<double>(32, 0.0)}}, {0.1}, {500, 32, 0});
  CHECK(g[0].slope == 0.0);
  CHECK(g[0].std_err == 0.0);
}

TEST_CASE("fused gradient check matches the serial reference") {
  ProblemSpec p = worked();
  p.phi0 = 0.5;
  const McConfig cfg{2000, 40, 7};
  const auto dirs = smooth_directions(40, 2, 3);
  for (const auto& base : {StrategySource::feedback(),
                           StrategySource::fixed(forced_liquidation_rates(p, 40))}) {
    const auto a = gradient_check(p, base, dirs, {0.2, 0.05}, cfg);
    const auto b = gradient_check_reference(p, base, dirs, {0.2, 0.05}, cfg);
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      for (std::size_t k = 0; k < 2; ++k) {
        CHECK(a[d].ladder[k].slope ==
              doctest::Approx(b[d].ladder[k].slope).epsilon(1e-9).scale(1e-9));
        CHECK(a[d].ladder[k].std_err ==
              doctest::Approx(b[d].ladder[k].std_err).epsilon(1e-9).scale(1e-9));
      }
    }
  }
}

TEST_CASE("the feedback strategy beats doing nothing on the worked instance") {
  const auto p = worked();
  const McConfig cfg{40000, 200, 2};
  std::vector<PathOutcome> a, b;
  const auto fb = mc_certainty_equivalent(p, cfg, StrategySource::feedback(), &a);
  const auto idle = mc_certainty_equivalent(
      p, cfg, StrategySource::fixed(forced_liquidation_rates(p, 200)), &b);

  // Paired delta-method error of the difference of the two log-mean-exps.
  const std::size_t n = a.size();
  std::vector<double> ea(n), eb(n);
  for (std::size_t i = 0; i < n; ++i) {
    ea[i] = std::exp(p.alpha * (a[i].claim - a[i].wealth));
    eb[i] = std::exp(p.alpha * (b[i].claim - b[i].wealth));
  }
  const double ma = deterministic_sum(ea) / n;
  const double mb = deterministic_sum(eb) / n;
  std::vector<double> d(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = eb[i] / mb - ea[i] / ma;
    d2[i] = d[i] * d[i];
  }
  const double md = deterministic_sum(d) / n;
  const double var = deterministic_sum(d2) / n - md * md;
  const double paired_se = std::sqrt(var / (n - 1)) / p.alpha;

  CHECK(idle.value - fb.value > 3.0 * paired_se);
}

TEST_CASE("moving away from the optimum costs more on both sides") {
  ProblemSpec p = worked();
  p.phi0 = 0.5;
  const McConfig cfg{20000, 100, 4};
  const auto dirs = smooth_directions(100, 3, 9);
  const auto base = mc_certainty_equivalent(p, cfg, StrategySource::feedback());
  for (const auto& d : dirs) {
    const double h = 1.0;
    const auto up = mc_certainty_equivalent(p, cfg, StrategySource::feedback().perturbed(d, h));
    const auto down = mc_certainty_equivalent(p, cfg, StrategySource::feedback().perturbed(d, -h));
    CHECK(up.value > base.value);
    CHECK(down.value > base.value);
  }
}

TEST_CASE("fixed strategies must liquidate") {
  const auto p = worked();
  CHECK_THROWS(mc_certainty_equivalent(p, {100, 32, 0},
                                       StrategySource::fixed(std::vector<double>(32, 0.5))));
  CHECK_THROWS(mc_certainty_equivalent(p, {1, 32, 0}, StrategySource::feedback()));
  CHECK_THROWS(mc_certainty_equivalent(p, {10, 4, 0}, StrategySource::feedback()));
}
