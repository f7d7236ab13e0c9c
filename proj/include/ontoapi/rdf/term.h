#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace ontoapi::rdf {

enum class TermKind : std::uint8_t { Iri, Blank, Literal };

// An RDF term. Simple literals carry an empty datatype (xsd:string is
// normalised to empty on construction); language-tagged literals carry an
// empty datatype and a lower-cased language tag.
struct Term {
  TermKind kind = TermKind::Iri;
  std::string value;
  std::string datatype;
  std::string language;

  static Term iri(std::string iri);
  static Term blank(std::string label);
  static Term literal(std::string lexical, std::string_view datatype = {});
  static Term langLiteral(std::string lexical, std::string_view language);

  bool isIri() const { return kind == TermKind::Iri; }
  bool isBlank() const { return kind == TermKind::Blank; }
  bool isLiteral() const { return kind == TermKind::Literal; }

  // Effective datatype IRI of a literal (xsd:string / rdf:langString for the
  // implicit cases).
  std::string effectiveDatatype() const;

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  auto operator<=>(const Triple&) const = default;
  bool operator==(const Triple&) const = default;
};

// N-Triples rendering of a single term.
std::string toNTriples(const Term& term);
std::string toNTriples(const Triple& triple);

// Escapes a lexical form for use inside a double-quoted N-Triples / SPARQL
// string.
std::string escapeString(std::string_view text);

// True when `iri` may be written between angle brackets in N-Triples, Turtle
// or SPARQL without escaping.
bool isSafeIri(std::string_view iri);

// Fragment after '#', else last '/' segment (else last ':' segment).
std::string localName(std::string_view iri);

}  // namespace ontoapi::rdf
