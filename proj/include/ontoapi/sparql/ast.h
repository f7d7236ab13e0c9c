#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ontoapi/rdf/term.h"

namespace ontoapi::sparql {

// A variable or a fixed term in a pattern position. Blank nodes in WHERE
// clauses are parsed as variables whose names cannot be written by users.
struct Node {
  std::string var;  // non-empty for variables
  rdf::Term term;

  bool isVar() const { return !var.empty(); }
  static Node variable(std::string name) { return Node{std::move(name), {}}; }
  static Node fixed(rdf::Term term) { return Node{{}, std::move(term)}; }
};

struct TriplePattern {
  Node subject;
  Node predicate;
  Node object;
};

struct GroupPattern;
struct Query;

struct Expr {
  enum class Op {
    Var, Const, Or, And, Not, Neg, Plus,
    Eq, Ne, Lt, Gt, Le, Ge,
    Add, Sub, Mul, Div,
    In, NotIn, Call, Exists, NotExists,
  };
  Op op = Op::Const;
  std::string name;  // variable name, upper-cased builtin or function IRI
  rdf::Term value;
  std::vector<std::shared_ptr<const Expr>> args;
  std::shared_ptr<const GroupPattern> pattern;  // EXISTS / NOT EXISTS
};
using ExprPtr = std::shared_ptr<const Expr>;

struct ValuesBlock {
  std::vector<std::string> vars;
  std::vector<std::vector<std::optional<rdf::Term>>> rows;
};

struct Element {
  enum class Kind {
    Triples, Group, Optional, Union, Minus, Graph, Filter, Bind, Values, SubQuery,
  };
  Kind kind = Kind::Triples;
  std::vector<TriplePattern> triples;
  std::vector<GroupPattern> groups;  // one for Group/Optional/Minus/Graph, n for Union
  Node graph;
  ExprPtr expr;
  std::string var;  // BIND target
  ValuesBlock values;
  std::shared_ptr<const Query> subquery;
};

struct GroupPattern {
  std::vector<Element> elements;
};

enum class QueryForm { Select, Construct, Ask };

struct Projection {
  std::string var;
  ExprPtr expr;  // null for a plain variable
};

struct OrderKey {
  ExprPtr expr;
  bool descending = false;
};

struct Query {
  QueryForm form = QueryForm::Select;
  bool distinct = false;
  bool selectAll = false;
  std::vector<Projection> projection;
  std::vector<TriplePattern> constructTemplate;
  std::vector<std::string> from;
  std::vector<std::string> fromNamed;
  GroupPattern where;
  std::vector<OrderKey> orderBy;
  std::optional<long long> limit;
  long long offset = 0;
};

struct QuadPattern {
  std::optional<Node> graph;  // unset: default graph (or WITH graph)
  TriplePattern triple;
};

struct UpdateOp {
  enum class Kind { InsertData, DeleteData, DeleteWhere, Modify, Clear, Drop, Create };
  enum class Target { Default, Named, All, Graph };
  Kind kind = Kind::InsertData;
  std::vector<QuadPattern> deleteQuads;
  std::vector<QuadPattern> insertQuads;
  std::optional<std::string> withGraph;
  GroupPattern where;
  Target target = Target::Default;
  std::string graphIri;
  bool silent = false;
};

}  // namespace ontoapi::sparql
