#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>

#include "ontoapi/common/errors.h"
#include "ontoapi/compiler/api_spec.h"
#include "ontoapi/ontology/model.h"

namespace ontoapi::compiler {

inline constexpr long long kDefaultPerPage = 100;
inline constexpr long long kMaxPerPage = 200;

struct CompileConfig {
  // Class IRIs to expose; nullopt exposes every class.
  std::optional<std::set<std::string>> filter;
  bool includeUndomained = false;
  std::string title = "Ontology API";
  std::string version = "1.0.0";
};

// Lower-cased, naively pluralised route segment ("Region" -> "regions").
std::string pathName(const ontology::ClassInfo& cls);
std::string pluralize(std::string_view lowerName);

struct ScalarMapping {
  ScalarType type = ScalarType::String;
  std::optional<std::string> format;
  bool operator==(const ScalarMapping&) const = default;
};
ScalarMapping datatypeToScalar(std::string_view datatypeIri);

// Schema for one class: id/label/type plus every effective property.
// Throws NotFoundError for unknown classes.
SchemaObject classToSchema(const ontology::OntologyModel& model,
                           const std::string& classIri,
                           bool includeUndomained = false,
                           Warnings* warnings = nullptr);

// Closes the filter under object-property ranges and superclasses. Throws
// NotFoundError listing every unknown filter IRI.
std::set<std::string> selectClasses(
    const ontology::OntologyModel& model,
    const std::optional<std::set<std::string>>& filter,
    bool includeUndomained = false);

// Maps filter entries given as local names (or full IRIs) to class IRIs.
// Throws NotFoundError listing the unknown entries.
std::set<std::string> resolveFilter(const ontology::OntologyModel& model,
                                    const std::vector<std::string>& entries);

// Collection route `/xs` and item route `/xs/{id}`.
std::pair<PathItem, PathItem> buildPaths(const ontology::ClassInfo& cls);

// Throws CompileError on route collisions, NotFoundError on bad filters.
ApiSpecDocument compileSpec(const ontology::OntologyModel& model,
                            const CompileConfig& config,
                            Warnings* warnings = nullptr);

}  // namespace ontoapi::compiler
