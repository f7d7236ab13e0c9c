#pragma once

#include <map>
#include <string>
#include <string_view>

#include "ontoapi/rdf/graph.h"
#include "ontoapi/rdf/lexer.h"

namespace ontoapi::rdf {

// Result of reading one RDF document: its triples (TriG graph blocks go to
// named graphs) and the prefix declarations seen while reading.
struct RdfDocument {
  Dataset dataset;
  std::map<std::string, std::string> prefixes;
};

// Reads Turtle, N-Triples, or TriG. Blank node labels are made unique per
// call, so documents read separately never share blank nodes. Throws
// SyntaxError carrying the offending line.
RdfDocument parseTurtle(std::string_view text, std::string_view baseIri = {});

// Resolves a (possibly relative) IRI reference against a base IRI.
std::string resolveIri(std::string_view base, std::string_view reference);

// Unique prefix for blank node labels minted by one reader invocation.
std::string freshBlankScope();

}  // namespace ontoapi::rdf
