#pragma once

#include <string_view>

#include "ontoapi/rdf/turtle.h"

namespace ontoapi::rdf {

// Reads an RDF/XML document into the default graph of an RdfDocument. The
// namespace declarations on the document become the prefix map. Supports
// node/property elements, rdf:about/ID/nodeID/resource, property
// attributes, rdf:datatype, xml:lang, xml:base and the Resource, Collection
// and Literal parse types. Throws SyntaxError with the offending line.
RdfDocument parseRdfXml(std::string_view text, std::string_view baseIri = {});

}  // namespace ontoapi::rdf
