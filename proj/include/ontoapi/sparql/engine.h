#pragma once

#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontoapi/rdf/graph.h"
#include "ontoapi/sparql/ast.h"

namespace ontoapi::sparql {

using Binding = std::map<std::string, rdf::Term>;

// SPARQL protocol dataset parameters (default-graph-uri / named-graph-uri).
// When both are empty the default graph is the union of the store's default
// graph and every named graph, and all named graphs are addressable.
struct DatasetSpec {
  std::vector<std::string> defaultGraphs;
  std::vector<std::string> namedGraphs;

  bool empty() const { return defaultGraphs.empty() && namedGraphs.empty(); }
};

struct SelectResult {
  std::vector<std::string> variables;
  std::vector<Binding> rows;
};

struct QueryResult {
  QueryForm form = QueryForm::Select;
  rdf::Graph graph;      // CONSTRUCT
  SelectResult select;   // SELECT
  bool boolean = false;  // ASK
};

// Evaluation failures that are not syntax errors.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

QueryResult evaluate(const Query& query, const rdf::Dataset& data,
                     const DatasetSpec& spec = {});
void applyUpdate(const std::vector<UpdateOp>& ops, rdf::Dataset& data);

// SPARQL 1.1 Query Results JSON format.
nlohmann::json toResultsJson(const QueryResult& result);

// Thread-safe in-memory quad store. Queries share a lock; each update
// request holds it exclusively and is applied atomically.
class Store {
 public:
  Store() = default;
  explicit Store(rdf::Dataset data) : data_(std::move(data)) {}

  QueryResult query(std::string_view text, const DatasetSpec& spec = {}) const;
  void update(std::string_view text);
  void load(const rdf::Dataset& data);

  rdf::Dataset snapshot() const;
  // Triple count of the default graph ("" key) and of each named graph.
  std::map<std::string, std::size_t> graphSizes() const;

 private:
  mutable std::shared_mutex mutex_;
  rdf::Dataset data_;
};

}  // namespace ontoapi::sparql
