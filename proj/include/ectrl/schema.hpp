#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace ectrl {

// The published experiment-config schema (schema/experiment_config.schema.json).
const std::string& experiment_config_schema_text();
const nlohmann::json& experiment_config_schema();

// Validates `instance` against a JSON Schema (draft-07 subset: type, enum,
// const, required, properties, additionalProperties, items, minItems,
// maxItems, minimum, maximum, exclusiveMinimum, exclusiveMaximum, pattern,
// anyOf, local $ref). Returns one message per violation, prefixed with the
// JSON pointer of the offending value; empty means valid.
std::vector<std::string> validate_json(const nlohmann::json& instance, const nlohmann::json& schema);

}  // namespace ectrl
