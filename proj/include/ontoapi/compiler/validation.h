#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontoapi/compiler/api_spec.h"

namespace ontoapi::compiler {

struct ValidationIssue {
  std::string path;  // e.g. "partOfRegion[0].label[1]"; empty for the root
  std::string message;

  bool operator==(const ValidationIssue&) const = default;
};

std::string toString(const ValidationIssue& issue);

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string path, const std::string& message)
      : std::runtime_error(toString({path, message})),
        path_(std::move(path)),
        message_(message) {}
  const std::string& path() const { return path_; }
  const std::string& message() const { return message_; }

 private:
  std::string path_;
  std::string message_;
};

// Checks a plain JSON resource against a class schema. Objects inside
// reference arrays are checked against the referenced schema. With
// `requireIds` every object needs a non-empty string id; otherwise ids may
// be absent (request bodies). Unknown fields are reported.
std::vector<ValidationIssue> validateResource(
    const nlohmann::json& value, const SchemaObject& schema,
    const std::map<std::string, SchemaObject>& schemas, bool requireIds,
    const std::string& path = "");

// Same, throwing ValidationError for the first issue.
void requireValid(const nlohmann::json& value, const SchemaObject& schema,
                  const std::map<std::string, SchemaObject>& schemas,
                  bool requireIds);

}  // namespace ontoapi::compiler
