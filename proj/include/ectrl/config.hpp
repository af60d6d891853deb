#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ectrl/control.hpp"
#include "ectrl/dynamics.hpp"
#include "ectrl/experiments.hpp"
#include "json.hpp"

namespace ectrl {

// Schema-validates, then converts. Every failure is InvalidConfig with the
// schema messages joined.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

Rational rational_from_json(const nlohmann::json& j);
nlohmann::json to_json(const UnitType& u);
nlohmann::json to_json(const Assignment& a);
UnitType unit_type_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DriverResult& r);

struct TypeTable {
  std::vector<UnitType> types;
  std::vector<Rational> densities;
};

// "<eigs>:<density>,<eigs>:<density>,..." where <eigs> is one rational per
// order separated by '|'. Example for order 2: "1|2:1/2,3|4:1/2".
TypeTable parse_types_flag(const std::string& text, int order);

}  // namespace ectrl
