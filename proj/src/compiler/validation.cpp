#include "ontoapi/compiler/validation.h"

#include <regex>

namespace ontoapi::compiler {

namespace {

std::string join(const std::string& path, const std::string& field) {
  return path.empty() ? field : path + "." + field;
}

bool matchesFormat(const std::string& value, const std::optional<std::string>& format) {
  static const std::regex dateTime(
      R"(-?\d{4,}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?(Z|[+-]\d{2}:\d{2})?)");
  if (format == "date-time") return std::regex_match(value, dateTime);
  return true;
}

bool matchesScalar(const nlohmann::json& v, ScalarType type) {
  switch (type) {
    case ScalarType::String:
      return v.is_string();
    case ScalarType::Integer:
      return v.is_number_integer();
    case ScalarType::Number:
      return v.is_number();
    case ScalarType::Boolean:
      return v.is_boolean();
  }
  return false;
}

}  // namespace

// ____________________________________________________________________________
std::string toString(const ValidationIssue& issue) {
  return issue.path.empty() ? issue.message : issue.path + ": " + issue.message;
}

// ____________________________________________________________________________
std::vector<ValidationIssue> validateResource(
    const nlohmann::json& value, const SchemaObject& schema,
    const std::map<std::string, SchemaObject>& schemas, bool requireIds,
    const std::string& path) {
  std::vector<ValidationIssue> issues;
  if (!value.is_object()) {
    issues.push_back({path, "expected an object of type " + schema.name});
    return issues;
  }
  if (requireIds && !value.contains("id")) issues.push_back({join(path, "id"), "missing id"});

  for (const auto& [key, field] : value.items()) {
    const std::string here = join(path, key);
    auto it = schema.properties.find(key);
    if (it == schema.properties.end()) {
      issues.push_back({here, "unknown field '" + key + "' for " + schema.name});
      continue;
    }
    const PropertySchema& prop = it->second;
    if (field.is_null()) {
      if (!prop.nullable) issues.push_back({here, "must not be null"});
      continue;
    }
    if (prop.shape == ValueShape::Scalar) {
      if (!matchesScalar(field, prop.scalarType.value_or(ScalarType::String))) {
        issues.push_back({here, "expected " + std::string(toString(
                                    prop.scalarType.value_or(ScalarType::String)))});
      } else if (key == "id" && field.get<std::string>().empty()) {
        issues.push_back({here, "id must not be empty"});
      }
      continue;
    }
    if (!field.is_array()) {
      issues.push_back({here, "expected an array"});
      continue;
    }
    for (std::size_t i = 0; i < field.size(); ++i) {
      const auto& item = field[i];
      const std::string at = here + "[" + std::to_string(i) + "]";
      if (prop.shape == ValueShape::ArrayOfRef) {
        auto target = schemas.find(prop.refTarget.value_or(""));
        if (target == schemas.end()) {
          issues.push_back({at, "unresolved schema " + prop.refTarget.value_or("")});
          continue;
        }
        auto nested = validateResource(item, target->second, schemas, requireIds, at);
        issues.insert(issues.end(), nested.begin(), nested.end());
        continue;
      }
      auto type = prop.scalarType.value_or(ScalarType::String);
      if (!matchesScalar(item, type)) {
        issues.push_back({at, "expected " + std::string(toString(type))});
      } else if (item.is_string() && !matchesFormat(item.get<std::string>(), prop.scalarFormat)) {
        issues.push_back({at, "not a valid " + *prop.scalarFormat});
      }
    }
  }
  return issues;
}

// ____________________________________________________________________________
void requireValid(const nlohmann::json& value, const SchemaObject& schema,
                  const std::map<std::string, SchemaObject>& schemas, bool requireIds) {
  auto issues = validateResource(value, schema, schemas, requireIds);
  if (!issues.empty()) throw ValidationError(issues.front().path, issues.front().message);
}

}  // namespace ontoapi::compiler
