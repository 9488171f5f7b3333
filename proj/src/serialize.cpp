#include "achedge/serialize.hpp"

#include <array>
#include <string>
#include <string_view>

#include "achedge/errors.hpp"

namespace achedge {

namespace {

constexpr std::array<std::string_view, 8> kProblemKeys = {
    "s0", "sigma", "mu", "lambda_impact", "alpha", "kappa", "t_horizon", "phi0"};

std::array<double*, 8> problem_fields(ProblemSpec& p) {
  return {&p.s0, &p.sigma, &p.mu, &p.lambda_impact, &p.alpha, &p.kappa, &p.t_horizon, &p.phi0};
}

}  // namespace

void to_json(nlohmann::json& j, const ProblemSpec& p) {
  j = nlohmann::json{{"s0", p.s0},       {"sigma", p.sigma},         {"mu", p.mu},
                     {"lambda_impact", p.lambda_impact}, {"alpha", p.alpha},
                     {"kappa", p.kappa}, {"t_horizon", p.t_horizon}, {"phi0", p.phi0}};
}

void from_json(const nlohmann::json& j, ProblemSpec& p) {
  if (!j.is_object()) throw ValidationError("problem must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto k : kProblemKeys) known = known || key == k;
    if (!known) throw ValidationError("unknown problem key '" + key + "'");
  }
  ProblemSpec out;
  auto fields = problem_fields(out);
  for (std::size_t i = 0; i < kProblemKeys.size(); ++i) {
    const std::string key(kProblemKeys[i]);
    if (!j.contains(key)) throw ValidationError("missing problem key '" + key + "'");
    if (!j.at(key).is_number()) throw ValidationError("problem key '" + key + "' must be a number");
    *fields[i] = j.at(key).get<double>();
  }
  p = out;
}

void to_json(nlohmann::json& j, const VariationalInstance& v) {
  j = nlohmann::json{{"kappa_v", v.kappa}, {"s0_v", v.s0},         {"mu_v", v.mu},
                     {"phi0_v", v.phi0},   {"sigma_v", v.sigma},   {"alpha_v", v.alpha},
                     {"lambda_v", v.lambda}, {"horizon_v", v.horizon}, {"rho_v", v.rho()}};
}

void to_json(nlohmann::json& j, const VariationalSolution& s) {
  j = nlohmann::json{{"c1", s.c1},         {"c2", s.c2},       {"c3", s.c3},
                     {"x_bar", s.x_bar},   {"y_bar", s.y_bar}, {"value", s.value},
                     {"mean", s.mean}};
}

void to_json(nlohmann::json& j, const DiscreteTrajectory& t) {
  j = nlohmann::json{{"grid", t.grid}, {"values", t.values}, {"objective_value", t.objective_value}};
}

void to_json(nlohmann::json& j, const QuadCoefficients& q) {
  j = nlohmann::json{{"a_coef", q.a_coef}, {"b_coef", q.b_coef},   {"c_coef", q.c_coef},
                     {"eta", q.eta},       {"theta", q.theta},     {"ab_minus_c2", q.ab_minus_c2},
                     {"constant", q.constant}};
}

void to_json(nlohmann::json& j, const McEstimate& e) {
  j = nlohmann::json{{"value", e.value},
                     {"std_err", e.std_err},
                     {"n_paths", e.n_paths},
                     {"n_steps", e.n_steps},
                     {"seed", e.seed}};
}

void to_json(nlohmann::json& j, const DualValueReport& r) {
  j = nlohmann::json{{"i_star", r.i_star},
                     {"j_integral", r.j_integral},
                     {"total", r.total},
                     {"quad_nodes", r.quad_nodes},
                     {"quad_error_estimate", r.quad_error_estimate}};
}

}  // namespace achedge
