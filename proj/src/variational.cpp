#include "achedge/variational.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "achedge/errors.hpp"
#include "achedge/hyperbolic.hpp"

namespace achedge {

namespace {

struct HorizonTerms {
  double sqrt_rho;
  double scaled;     // sqrt(rho) T
  double tanh_half;  // tanh(sqrt(rho) T / 2)
  double coth_full;  // coth(sqrt(rho) T)
  double gap;        // sqrt(rho) T - 2 tanh(sqrt(rho) T / 2)
};

HorizonTerms horizon_terms(const VariationalInstance& inst) {
  const double sqrt_rho = std::sqrt(inst.rho());
  const double b = sqrt_rho * inst.horizon;
  if (!(b >= kMinScaledHorizon)) {
    throw DegenerateHorizonError("sqrt(rho) * horizon = " + std::to_string(b) +
                                 " is below the degenerate-horizon threshold");
  }
  return {sqrt_rho, b, std::tanh(0.5 * b), hyp::coth(b), hyp::x_minus_2tanh_half(b)};
}

}  // namespace

void validate_instance(const VariationalInstance& inst) {
  const double fields[] = {inst.kappa, inst.s0,    inst.mu,     inst.phi0,
                           inst.sigma, inst.alpha, inst.lambda, inst.horizon};
  for (double v : fields) {
    if (!std::isfinite(v)) throw ValidationError("instance parameters must be finite");
  }
  if (!(inst.sigma > 0.0 && inst.alpha > 0.0 && inst.lambda > 0.0 && inst.horizon > 0.0)) {
    throw ValidationError("instance requires sigma, alpha, lambda, horizon > 0");
  }
  const double bound = 1.0 / (2.0 * inst.alpha * inst.sigma * inst.sigma * inst.horizon);
  if (!(inst.kappa >= 0.0 && inst.kappa < bound)) {
    throw ValidationError("instance kappa must lie in [0, " + std::to_string(bound) + ")");
  }
}

QuadCoefficients coefficients(const VariationalInstance& inst) {
  validate_instance(inst);
  const HorizonTerms h = horizon_terms(inst);
  const double lam = inst.lambda;
  const double T = inst.horizon;
  const double var = inst.sigma * inst.sigma;

  QuadCoefficients q{};
  q.a_coef = inst.kappa -
             (h.coth_full + h.tanh_half * h.tanh_half / h.gap) / (2.0 * lam * h.sqrt_rho);
  q.b_coef = -h.tanh_half / (lam * T * h.gap);
  q.c_coef = h.tanh_half / (2.0 * lam * h.gap);
  q.eta = 2.0 * inst.kappa * inst.s0 + inst.mu / (inst.alpha * var);
  q.theta = -inst.phi0 / T;
  // A B - C^2 formed directly loses everything to cancellation when gap is tiny.
  q.ab_minus_c2 = (0.25 / (h.sqrt_rho * lam) - inst.kappa * h.tanh_half) / (lam * T * h.gap);
  q.constant = inst.kappa * inst.s0 * inst.s0 + inst.phi0 * inst.phi0 * lam / (2.0 * T) -
               inst.mu * inst.mu * T / (2.0 * inst.alpha * var);

  if (!(q.b_coef < 0.0) || !(q.ab_minus_c2 > 0.0)) {
    throw ValidationError("reduced quadratic form is not strictly concave");
  }
  return q;
}

Endpoints optimal_endpoints(const QuadCoefficients& q) {
  const double scale = 1.0 / (2.0 * q.ab_minus_c2);
  return {scale * (q.c_coef * q.theta - q.b_coef * q.eta),
          scale * (q.c_coef * q.eta - q.a_coef * q.theta)};
}

VariationalSolution solve_closed_form(const VariationalInstance& inst) {
  const QuadCoefficients q = coefficients(inst);
  const HorizonTerms h = horizon_terms(inst);
  const auto [x, y] = optimal_endpoints(q);

  VariationalSolution sol{};
  sol.x_bar = x;
  sol.y_bar = y;
  sol.c3 = (h.sqrt_rho * y - x * h.tanh_half) / h.gap;
  const double sinh_full = std::sinh(h.scaled);
  sol.c1 = (x - sol.c3) / sinh_full;
  sol.c2 = -sol.c3 / sinh_full;
  sol.value = q.constant + 0.5 * (q.eta * x + q.theta * y);
  sol.mean = y / inst.horizon;
  return sol;
}

double evaluate_delta(const VariationalSolution& sol, const VariationalInstance& inst, double t) {
  if (!(t >= 0.0 && t <= inst.horizon)) {
    throw std::out_of_range("evaluate_delta: t outside [0, horizon]");
  }
  const double sqrt_rho = std::sqrt(inst.rho());
  const double b = sqrt_rho * inst.horizon;
  const double u = sqrt_rho * t;
  // c1 sinh(u) + c2 sinh(b - u) + c3 regrouped so that large b and small b both stay finite.
  return sol.x_bar * hyp::sinh_ratio(u, b) + sol.c3 * hyp::bump(u, b);
}

double constrained_min_value(const VariationalInstance& inst, double x, double y) {
  validate_instance(inst);
  const HorizonTerms h = horizon_terms(inst);
  const double av = inst.alpha * inst.sigma * inst.sigma;
  const double skew = x * h.tanh_half - h.sqrt_rho * y;
  return inst.mu * inst.mu * inst.horizon / (2.0 * av) - inst.mu * x / av +
         (x * x * h.coth_full + skew * skew / h.gap) / (2.0 * inst.lambda * h.sqrt_rho);
}

double objective(const VariationalInstance& inst, const DiscreteTrajectory& traj) {
  const auto& g = traj.grid;
  const auto& v = traj.values;
  if (g.size() != v.size() || g.size() < 2) {
    throw std::invalid_argument("objective: grid and values must match and hold >= 2 points");
  }
  if (v.front() != 0.0) throw std::invalid_argument("objective: trajectory must start at 0");

  const double av = inst.alpha * inst.sigma * inst.sigma;
  double kinetic = 0.0;
  double square = 0.0;
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double h = g[i + 1] - g[i];
    const double a = v[i];
    const double b = v[i + 1];
    const double slope = (b - a) / h - inst.mu;
    kinetic += slope * slope * h;
    square += h / 3.0 * (a * a + a * b + b * b);
    integral += 0.5 * h * (a + b);
  }
  const double T = g.back() - g.front();
  const double terminal = inst.s0 + v.back();
  const double shortfall = inst.phi0 * inst.lambda - integral;
  return inst.kappa * terminal * terminal - kinetic / (2.0 * av) +
         (shortfall * shortfall / T - square) / (2.0 * inst.lambda);
}

DiscreteTrajectory solve_discretized(const VariationalInstance& inst, std::size_t n) {
  if (n < 8) throw std::invalid_argument("solve_discretized: n must be >= 8");
  validate_instance(inst);

  const double T = inst.horizon;
  const double h = T / static_cast<double>(n);
  const double av = inst.alpha * inst.sigma * inst.sigma;
  const double lam = inst.lambda;
  const auto m = static_cast<Eigen::Index>(n);  // unknowns delta_1..delta_n

  // Negated Hessian N and linear term g: objective = -1/2 d'Nd + g'd + const.
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(m, h);
  w(m - 1) = 0.5 * h;

  const double stiff = 1.0 / (av * h);
  for (Eigen::Index k = 0; k < m; ++k) {
    const bool last = (k == m - 1);
    N(k, k) += stiff * (last ? 1.0 : 2.0) + (last ? h / 3.0 : 2.0 * h / 3.0) / lam;
    if (!last) {
      N(k, k + 1) += -stiff + h / (6.0 * lam);
      N(k + 1, k) += -stiff + h / (6.0 * lam);
    }
  }
  N(m - 1, m - 1) -= 2.0 * inst.kappa;
  N.noalias() -= (w * w.transpose()) / (lam * T);

  g(m - 1) += 2.0 * inst.kappa * inst.s0 + inst.mu / av;
  g -= (inst.phi0 / T) * w;

  Eigen::LLT<Eigen::MatrixXd> llt(N);
  if (llt.info() != Eigen::Success) {
    throw NonConcaveError("discretized objective is not strictly concave");
  }
  const Eigen::VectorXd delta = llt.solve(g);

  DiscreteTrajectory traj;
  traj.grid.resize(n + 1);
  traj.values.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    traj.grid[i] = (i == n) ? T : T * static_cast<double>(i) / static_cast<double>(n);
    traj.values[i] = (i == 0) ? 0.0 : delta(static_cast<Eigen::Index>(i - 1));
  }
  traj.objective_value = objective(inst, traj);
  return traj;
}

double mean_of_optimal_delta(const VariationalInstance& inst) {
  validate_instance(inst);
  const HorizonTerms h = horizon_terms(inst);
  const double lam = inst.lambda;
  const double drive = 2.0 * inst.kappa * inst.s0 + inst.mu / (inst.alpha * inst.sigma * inst.sigma);
  const double num = drive * h.tanh_half -
                     (h.coth_full - 2.0 * lam * h.sqrt_rho * inst.kappa) * inst.phi0;
  const double den = 1.0 / (h.sqrt_rho * lam) - 4.0 * inst.kappa * h.tanh_half;
  return num / den + inst.phi0 * lam / inst.horizon;
}

}  // namespace achedge
