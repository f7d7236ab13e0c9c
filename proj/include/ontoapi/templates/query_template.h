#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ontoapi/compiler/api_spec.h"
#include "ontoapi/ontology/model.h"
#include "ontoapi/rdf/term.h"

namespace ontoapi::templates {

enum class TemplateKind { GetAll, GetById, Insert, Update, Delete, Custom };

// File stem used for generated templates ("get_all", "get_by_id", ...).
std::string_view toString(TemplateKind kind);
std::optional<TemplateKind> kindFromString(std::string_view name);
inline constexpr TemplateKind kDefaultKinds[] = {
    TemplateKind::GetAll, TemplateKind::GetById, TemplateKind::Insert,
    TemplateKind::Update, TemplateKind::Delete};

// `?_x_iri` -> Iri, `?_x_int` -> Integer, `?_x_triples` -> Triples, anything
// else -> Literal.
enum class PlaceholderType { Iri, Literal, Integer, Triples };

struct PlaceholderSpec {
  std::string name;  // without the leading `?_` / `?__`
  PlaceholderType type = PlaceholderType::Literal;
  bool required = true;  // `?__name` marks an optional placeholder

  bool operator==(const PlaceholderSpec&) const = default;
};

PlaceholderType placeholderTypeFor(std::string_view name);
// Name without the type suffix ("region_iri" -> "region").
std::string parameterName(const PlaceholderSpec& spec);

struct QueryTemplate {
  std::string name;
  TemplateKind kind = TemplateKind::Custom;
  std::string text;  // query body without decorator lines
  std::vector<PlaceholderSpec> placeholders;
  std::optional<std::string> summary;
  std::map<std::string, std::string> metadata;  // all `#+ key: value` lines
};

struct IriValue {
  std::string iri;
  bool operator==(const IriValue&) const = default;
};
using BindingValue =
    std::variant<IriValue, std::string, long long, std::vector<rdf::Triple>>;

struct PlaceholderBinding {
  std::string name;
  BindingValue value;
};

// Missing bindings, type mismatches and values rejected by the injection
// guard.
class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecoratorError : public std::runtime_error {
 public:
  DecoratorError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Decorated {
  std::optional<std::string> summary;
  std::map<std::string, std::string> metadata;
  std::vector<PlaceholderSpec> placeholders;  // in order of first use
  std::string body;
};

// Splits leading `#+ key: value` lines from the query and collects the
// placeholders used in the body. Throws DecoratorError.
Decorated parseDecorators(const std::string& text);

// Placeholder tokens of a query body, skipping strings, IRIs and comments.
std::vector<PlaceholderSpec> scanPlaceholders(const std::string& body);

QueryTemplate makeTemplate(std::string name, TemplateKind kind,
                           const std::string& fileText);

// The five CRUD templates for one class.
std::vector<QueryTemplate> generateDefaultTemplates(const ontology::ClassInfo& cls);

// Substitutes every placeholder. Unbound optional literals become "" and
// unbound optional integers 0. Throws TemplateError.
std::string instantiate(const QueryTemplate& tmpl,
                        const std::vector<PlaceholderBinding>& bindings);

// `.rq` file text: decorators followed by the body.
std::string renderRq(const QueryTemplate& tmpl);

// True when the first operation after the prologue is CONSTRUCT.
bool isConstructQuery(const std::string& body);

struct CustomEndpoint {
  std::string route;
  std::string rootClass;  // class IRI whose schema describes the results
  QueryTemplate query;
};

// Validates a custom query for GET `route`. Throws TemplateError for non
// CONSTRUCT bodies and route collisions.
CustomEndpoint registerCustomQuery(const std::string& route,
                                   const std::string& rootClass,
                                   QueryTemplate query,
                                   const std::set<std::string>& existingRoutes);

// OpenAPI description of a custom endpoint: query parameters from the
// placeholders, array of `schemaName` as the response.
compiler::PathItem customPathItem(const CustomEndpoint& endpoint,
                                  const std::string& schemaName);

}  // namespace ontoapi::templates
