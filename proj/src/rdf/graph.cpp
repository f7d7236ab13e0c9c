#include "ontoapi/rdf/graph.h"

namespace ontoapi::rdf {

// ____________________________________________________________________________
bool Graph::insert(Triple triple) {
  return triples_.insert(std::move(triple)).second;
}

// ____________________________________________________________________________
bool Graph::erase(const Triple& triple) { return triples_.erase(triple) > 0; }

// ____________________________________________________________________________
void Graph::merge(const Graph& other) {
  triples_.insert(other.triples_.begin(), other.triples_.end());
}

// ____________________________________________________________________________
std::vector<Triple> Graph::match(const std::optional<Term>& subject,
                                 const std::optional<Term>& predicate,
                                 const std::optional<Term>& object) const {
  std::vector<Triple> result;
  auto accepts = [&](const Triple& t) {
    return (!predicate || t.predicate == *predicate) &&
           (!object || t.object == *object);
  };
  if (subject) {
    // Term{} is the minimum of the term ordering.
    Triple probe{*subject, predicate.value_or(Term{}), Term{}};
    for (auto it = triples_.lower_bound(probe);
         it != triples_.end() && it->subject == *subject; ++it) {
      if (predicate && it->predicate != *predicate) break;
      if (accepts(*it)) result.push_back(*it);
    }
    return result;
  }
  for (const auto& t : triples_) {
    if (accepts(t)) result.push_back(t);
  }
  return result;
}

// ____________________________________________________________________________
std::vector<Term> Graph::objects(const Term& subject,
                                 const Term& predicate) const {
  std::vector<Term> result;
  for (auto& t : match(subject, predicate, std::nullopt)) {
    result.push_back(std::move(t.object));
  }
  return result;
}

// ____________________________________________________________________________
std::vector<Term> Graph::subjects(const Term& predicate,
                                  const Term& object) const {
  std::vector<Term> result;
  for (auto& t : match(std::nullopt, predicate, object)) {
    result.push_back(std::move(t.subject));
  }
  return result;
}

// ____________________________________________________________________________
bool Graph::hasSubject(const Term& subject) const {
  auto it = triples_.lower_bound(Triple{subject, Term{}, Term{}});
  return it != triples_.end() && it->subject == subject;
}

// ____________________________________________________________________________
std::size_t Dataset::size() const {
  std::size_t total = defaultGraph.size();
  for (const auto& [name, graph] : namedGraphs) total += graph.size();
  return total;
}

// ____________________________________________________________________________
std::string toNTriples(const Graph& graph) {
  std::string out;
  for (const auto& triple : graph) {
    out += toNTriples(triple);
    out += '\n';
  }
  return out;
}

}  // namespace ontoapi::rdf
