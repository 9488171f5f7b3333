#pragma once

#include <json.hpp>

#include "achedge/core_model.hpp"
#include "achedge/dual.hpp"
#include "achedge/simulate.hpp"
#include "achedge/variational.hpp"

namespace achedge {

// ProblemSpec <-> flat object with exactly the eight snake_case fields. Missing,
// unknown, or non-numeric keys throw ValidationError.
void to_json(nlohmann::json& j, const ProblemSpec& p);
void from_json(const nlohmann::json& j, ProblemSpec& p);

void to_json(nlohmann::json& j, const VariationalInstance& v);
void to_json(nlohmann::json& j, const VariationalSolution& s);
void to_json(nlohmann::json& j, const DiscreteTrajectory& t);
void to_json(nlohmann::json& j, const QuadCoefficients& q);
void to_json(nlohmann::json& j, const McEstimate& e);
void to_json(nlohmann::json& j, const DualValueReport& r);

}  // namespace achedge
