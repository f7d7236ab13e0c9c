#pragma once

#include <string_view>
#include <vector>

#include "ontoapi/rdf/lexer.h"
#include "ontoapi/sparql/ast.h"

namespace ontoapi::sparql {

// SPARQL 1.1 subset: SELECT / CONSTRUCT / ASK with basic graph patterns,
// OPTIONAL, UNION, MINUS, GRAPH, FILTER, BIND, VALUES, subqueries, ORDER BY,
// LIMIT and OFFSET. Property paths and aggregates are rejected. Throws
// rdf::SyntaxError.
Query parseQuery(std::string_view text);

// INSERT DATA, DELETE DATA, DELETE WHERE, DELETE/INSERT ... WHERE (with
// optional WITH), CLEAR, DROP and CREATE, separated by ';'.
std::vector<UpdateOp> parseUpdate(std::string_view text);

}  // namespace ontoapi::sparql
