#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ontoapi/rdf/term.h"

namespace ontoapi::rdf {

// A set of triples ordered by (subject, predicate, object).
class Graph {
 public:
  using const_iterator = std::set<Triple>::const_iterator;

  Graph() = default;
  Graph(std::initializer_list<Triple> triples) : triples_(triples) {}

  bool insert(Triple triple);
  bool erase(const Triple& triple);
  bool contains(const Triple& triple) const { return triples_.contains(triple); }
  void merge(const Graph& other);
  void clear() { triples_.clear(); }

  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  const_iterator begin() const { return triples_.begin(); }
  const_iterator end() const { return triples_.end(); }

  // All triples matching the pattern; unset positions are wildcards.
  std::vector<Triple> match(const std::optional<Term>& subject,
                            const std::optional<Term>& predicate,
                            const std::optional<Term>& object) const;

  // Convenience lookups.
  std::vector<Term> objects(const Term& subject, const Term& predicate) const;
  std::vector<Term> subjects(const Term& predicate, const Term& object) const;
  bool hasSubject(const Term& subject) const;

  bool operator==(const Graph&) const = default;

 private:
  std::set<Triple> triples_;
};

// A default graph plus named graphs keyed by IRI.
struct Dataset {
  Graph defaultGraph;
  std::map<std::string, Graph> namedGraphs;

  std::size_t size() const;
};

// Sorted N-Triples document.
std::string toNTriples(const Graph& graph);

}  // namespace ontoapi::rdf
