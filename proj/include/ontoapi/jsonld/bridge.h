#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontoapi/common/errors.h"
#include "ontoapi/compiler/validation.h"
#include "ontoapi/ontology/model.h"
#include "ontoapi/rdf/graph.h"

namespace ontoapi::jsonld {

using compiler::ValidationError;

// ____________________________________________________________________________
// JSON-LD context

enum class TermKind { Keyword, Class, ObjectProperty, DatatypeProperty };

struct TermDefinition {
  std::string iri;  // "@id" / "@type" for keywords
  TermKind kind = TermKind::DatatypeProperty;
  bool setContainer = false;
  // Literal datatype for datatype properties with a declared range.
  std::optional<std::string> datatype;

  bool operator==(const TermDefinition&) const = default;
};

class ContextMap {
 public:
  ContextMap() = default;
  explicit ContextMap(std::map<std::string, TermDefinition> terms);

  const std::map<std::string, TermDefinition>& terms() const { return terms_; }
  const TermDefinition* term(const std::string& name) const;
  // Term name for an IRI (classes and properties only), or nullptr.
  const std::string* nameForIri(const std::string& iri) const;

  bool operator==(const ContextMap& other) const { return terms_ == other.terms_; }

 private:
  std::map<std::string, TermDefinition> terms_;
  std::map<std::string, std::string> byIri_;
};

// One term per included class and per effective property of an included
// class, plus the id/type/label conventions. A class whose local name is
// taken by a property is left out with a warning.
ContextMap generateContext(const ontology::OntologyModel& model,
                           const std::set<std::string>& included,
                           bool includeUndomained = false,
                           Warnings* warnings = nullptr);

// `{"@context": {...}}` document. Throws std::runtime_error when reading
// term definitions outside the generated subset.
nlohmann::json toJson(const ContextMap& context);
ContextMap contextFromJson(const nlohmann::json& document);

// ____________________________________________________________________________
// Route segment <-> class IRI table (paths.map)

class PathClassTable {
 public:
  // Throws CompileError unless the entries form a bijection.
  void add(const std::string& segment, const std::string& classIri);

  const std::string* classFor(const std::string& segment) const;
  const std::string* segmentFor(const std::string& classIri) const;
  const std::map<std::string, std::string>& entries() const { return bySegment_; }

  bool operator==(const PathClassTable& other) const {
    return bySegment_ == other.bySegment_;
  }

 private:
  std::map<std::string, std::string> bySegment_;
  std::map<std::string, std::string> byClass_;
};

PathClassTable buildPathTable(const ontology::OntologyModel& model,
                              const std::set<std::string>& included);
// "segment<TAB>class IRI" lines sorted by segment.
std::string serializePathTable(const PathClassTable& table);
// Blank lines and lines starting with '#' are ignored. Throws CompileError.
PathClassTable parsePathTable(const std::string& text);

// ____________________________________________________________________________
// Instance ids

// IRIs under the prefix shorten to the suffix; everything else stays
// absolute. Suffixes that would read as an absolute IRI are not shortened.
std::string encodeId(const std::string& iri, const std::string& instancePrefix);
std::string decodeId(const std::string& id, const std::string& instancePrefix);
bool isAbsoluteIri(const std::string& value);

// ____________________________________________________________________________
// Plain JSON resources

struct ResourceEnvelope {
  std::optional<std::string> id;
  std::vector<std::string> label;
  std::vector<std::string> type;
  std::map<std::string, std::vector<ResourceEnvelope>> links;
  std::map<std::string, std::vector<nlohmann::json>> values;

  bool isStub() const { return links.empty() && values.empty(); }
  // Sorts every list (links by id, scalars by JSON order), recursively.
  void normalize();

  bool operator==(const ResourceEnvelope&) const = default;
};

// Empty lists are omitted; id is always written when present.
nlohmann::json toJson(const ResourceEnvelope& envelope);
// Fields are classified through the context. Throws ValidationError naming
// the field for unknown fields and malformed values.
ResourceEnvelope envelopeFromJson(const nlohmann::json& json,
                                  const ContextMap& context,
                                  const std::string& path = "");

// One envelope per root, in the given order. Roots absent from the graph
// (no outgoing triples) are skipped. Blank node objects and predicates
// missing from the context are dropped with a warning.
std::vector<ResourceEnvelope> frameRoots(const rdf::Graph& graph,
                                         const std::vector<std::string>& roots,
                                         const ContextMap& context,
                                         const std::string& instancePrefix,
                                         Warnings* warnings = nullptr);

// Roots are `rootIri` when given, else every IRI subject typed `rootClass`
// (sorted by IRI).
std::vector<ResourceEnvelope> frameResults(const rdf::Graph& graph,
                                           const std::string& rootClass,
                                           const std::optional<std::string>& rootIri,
                                           const ContextMap& context,
                                           const std::string& instancePrefix,
                                           Warnings* warnings = nullptr);

// Triples asserted by one resource: types, labels, links to nested ids (stubs
// contribute nothing else) and typed literals. Throws ValidationError for a
// missing id, unknown fields or types, and scalars that do not fit the
// property's datatype.
std::vector<rdf::Triple> envelopeToTriples(const ResourceEnvelope& resource,
                                           const ContextMap& context,
                                           const std::string& instancePrefix);

// JSON value of a literal: integers, numbers and booleans by datatype,
// lexical form otherwise.
nlohmann::json literalToJson(const rdf::Term& literal);

}  // namespace ontoapi::jsonld
