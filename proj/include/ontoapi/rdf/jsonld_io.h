#pragma once

#include <nlohmann/json.hpp>

#include "ontoapi/rdf/graph.h"

namespace ontoapi::rdf {

// Reads a JSON-LD document as returned by SPARQL endpoints for CONSTRUCT
// queries: expanded or flattened form, optionally with a `@graph` wrapper
// and a flat `@context` of term/prefix definitions (string or {"@id",
// "@type"} entries, plus `@vocab`). Remote contexts are not fetched.
Graph parseJsonLd(const nlohmann::json& document);

// Writes a graph as expanded JSON-LD: one node object per subject, sorted by
// subject.
nlohmann::json toExpandedJsonLd(const Graph& graph);

}  // namespace ontoapi::rdf
