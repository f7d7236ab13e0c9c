#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ontoapi/common/errors.h"

namespace ontoapi::ontology {

struct ClassInfo {
  std::string iri;
  std::string localName;
  std::optional<std::string> comment;
  std::set<std::string> directSuperclasses;

  bool operator==(const ClassInfo&) const = default;
};

enum class PropertyKind { Object, Datatype };

struct PropertyInfo {
  std::string iri;
  std::string localName;
  std::optional<std::string> comment;
  PropertyKind kind = PropertyKind::Datatype;
  // Named classes; union expressions are expanded into their members.
  std::set<std::string> domains;
  // Class IRIs for object properties, datatype IRIs for datatype ones.
  std::set<std::string> ranges;
  // Read for completeness; schema cardinality ignores it.
  bool functional = false;

  bool operator==(const PropertyInfo&) const = default;
};

// Classes and properties extracted from one or more ontology documents.
// Immutable after loading.
class OntologyModel {
 public:
  std::map<std::string, std::string> prefixes;
  std::map<std::string, ClassInfo> classes;        // keyed by IRI
  std::map<std::string, PropertyInfo> properties;  // keyed by IRI
  std::vector<std::string> ontologyIris;

  bool hasClass(const std::string& iri) const { return classes.contains(iri); }
  // Throws NotFoundError.
  const ClassInfo& classInfo(const std::string& iri) const;
  const ClassInfo* findClassByLocalName(const std::string& localName) const;

  bool operator==(const OntologyModel&) const = default;
};

enum class Syntax { Turtle, RdfXml };

struct SourceDocument {
  std::string name;  // path or URL, used in diagnostics
  std::string content;
  Syntax syntax = Syntax::Turtle;
};

// Chooses the reader by file extension: .ttl/.nt/.trig/.n3 are Turtle;
// .owl/.rdf/.xml are RDF/XML. Unknown extensions are sniffed from content.
Syntax syntaxFor(const std::string& name, const std::string& content);

// Reads a document from disk or, for http(s) URLs, over the network with
// content negotiation. Throws LoadError.
SourceDocument readSource(const std::string& pathOrUrl);

// Parses all documents and extracts the class/property model. Throws
// LoadError (with document and line) on syntax errors and ModelError when
// two classes (or two properties) share a local name.
OntologyModel loadOntology(std::span<const SourceDocument> documents,
                           Warnings* warnings = nullptr);

// Transitive superclasses of `classIri`, excluding the class itself.
// Terminates on cycles. Throws NotFoundError for unknown classes.
std::set<std::string> superclassClosure(const OntologyModel& model,
                                        const std::string& classIri);

// Properties whose domain contains the class or one of its superclasses.
// Properties without a domain are included only when `includeUndomained`.
// Ordered by local name. Throws NotFoundError for unknown classes.
std::vector<const PropertyInfo*> effectiveProperties(
    const OntologyModel& model, const std::string& classIri,
    bool includeUndomained = false);

}  // namespace ontoapi::ontology
