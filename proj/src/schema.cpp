#include "ectrl/schema.hpp"

#include <cmath>
#include <regex>

#include "ectrl/error.hpp"
#include "ectrl/schema_text.hpp"

namespace ectrl {

using nlohmann::json;

const std::string& experiment_config_schema_text() {
  static const std::string text = detail::kExperimentConfigSchema;
  return text;
}

const json& experiment_config_schema() {
  static const json schema = json::parse(experiment_config_schema_text());
  return schema;
}

namespace {

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void check(const json& value, const json& schema, const std::string& path, std::vector<std::string>& errors) const {
    if (schema.contains("$ref")) {
      check(value, resolve(schema["$ref"].get<std::string>()), path, errors);
      return;
    }
    if (schema.contains("anyOf")) {
      bool any = false;
      for (const json& option : schema["anyOf"]) {
        std::vector<std::string> scratch;
        check(value, option, path, scratch);
        if (scratch.empty()) {
          any = true;
          break;
        }
      }
      if (!any) errors.push_back(where(path) + "does not match any allowed form");
    }
    if (schema.contains("type") && !type_matches(value, schema["type"])) {
      errors.push_back(where(path) + "expected type " + schema["type"].dump());
      return;
    }
    if (schema.contains("enum")) {
      bool found = false;
      for (const json& option : schema["enum"]) found = found || option == value;
      if (!found) errors.push_back(where(path) + value.dump() + " is not one of " + schema["enum"].dump());
    }
    if (schema.contains("const") && schema["const"] != value)
      errors.push_back(where(path) + "must equal " + schema["const"].dump());
    if (value.is_number()) check_number(value.get<double>(), schema, path, errors);
    if (value.is_string() && schema.contains("pattern")) {
      const std::regex re(schema["pattern"].get<std::string>(), std::regex::ECMAScript);
      if (!std::regex_search(value.get<std::string>(), re))
        errors.push_back(where(path) + "\"" + value.get<std::string>() + "\" does not match the required pattern");
    }
    if (value.is_array()) {
      if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>())
        errors.push_back(where(path) + "needs at least " + schema["minItems"].dump() + " items");
      if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<std::size_t>())
        errors.push_back(where(path) + "allows at most " + schema["maxItems"].dump() + " items");
      if (schema.contains("items"))
        for (std::size_t i = 0; i < value.size(); ++i) check(value[i], schema["items"], path + "/" + std::to_string(i), errors);
    }
    if (value.is_object()) {
      if (schema.contains("required"))
        for (const json& key : schema["required"])
          if (!value.contains(key.get<std::string>()))
            errors.push_back(where(path) + "missing required property \"" + key.get<std::string>() + "\"");
      const json* properties = schema.contains("properties") ? &schema["properties"] : nullptr;
      const bool closed = schema.contains("additionalProperties") && schema["additionalProperties"] == false;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (properties && properties->contains(it.key()))
          check(it.value(), (*properties)[it.key()], path + "/" + it.key(), errors);
        else if (closed)
          errors.push_back(where(path) + "unknown property \"" + it.key() + "\"");
      }
    }
  }

 private:
  static std::string where(const std::string& path) { return (path.empty() ? std::string("/") : path) + ": "; }

  const json& resolve(const std::string& ref) const {
    if (ref.rfind("#/", 0) != 0) throw Error(ErrorCode::InvalidConfig, "only local $ref supported: " + ref);
    return root_.at(json::json_pointer(ref.substr(1)));
  }

  static bool type_matches(const json& value, const json& type) {
    if (type.is_array()) {
      for (const json& t : type)
        if (type_matches(value, t)) return true;
      return false;
    }
    const std::string t = type.get<std::string>();
    if (t == "object") return value.is_object();
    if (t == "array") return value.is_array();
    if (t == "string") return value.is_string();
    if (t == "boolean") return value.is_boolean();
    if (t == "null") return value.is_null();
    if (t == "number") return value.is_number();
    if (t == "integer") return value.is_number_integer() || (value.is_number_float() && value.get<double>() == std::floor(value.get<double>()));
    return false;
  }

  static void check_number(double v, const json& schema, const std::string& path, std::vector<std::string>& errors) {
    if (schema.contains("minimum") && v < schema["minimum"].get<double>())
      errors.push_back(where(path) + "must be >= " + schema["minimum"].dump());
    if (schema.contains("maximum") && v > schema["maximum"].get<double>())
      errors.push_back(where(path) + "must be <= " + schema["maximum"].dump());
    if (schema.contains("exclusiveMinimum") && v <= schema["exclusiveMinimum"].get<double>())
      errors.push_back(where(path) + "must be > " + schema["exclusiveMinimum"].dump());
    if (schema.contains("exclusiveMaximum") && v >= schema["exclusiveMaximum"].get<double>())
      errors.push_back(where(path) + "must be < " + schema["exclusiveMaximum"].dump());
  }

  const json& root_;
};

}  // namespace

std::vector<std::string> validate_json(const json& instance, const json& schema) {
  std::vector<std::string> errors;
  Validator(schema).check(instance, schema, "", errors);
  return errors;
}

}  // namespace ectrl
