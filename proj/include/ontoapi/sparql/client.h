#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "ontoapi/rdf/graph.h"
#include "ontoapi/sparql/engine.h"

namespace httplib {
class Server;
}

namespace ontoapi::sparql {

// The endpoint could not be reached or rejected the request.
class EndpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Minimal SPARQL protocol client used by the gateway. Implementations are
// safe to share between threads.
class SparqlClient {
 public:
  virtual ~SparqlClient() = default;
  virtual rdf::Graph construct(const std::string& query,
                               const DatasetSpec& dataset = {}) = 0;
  virtual void update(const std::string& update) = 0;
};

// Runs requests directly against an in-process store.
class EmbeddedSparqlClient : public SparqlClient {
 public:
  explicit EmbeddedSparqlClient(Store& store) : store_(store) {}
  rdf::Graph construct(const std::string& query, const DatasetSpec& dataset) override;
  void update(const std::string& update) override;

 private:
  Store& store_;
};

// SPARQL 1.1 protocol over HTTP(S). CONSTRUCT results are requested as
// N-Triples or Turtle, with JSON-LD accepted as a fallback.
class HttpSparqlClient : public SparqlClient {
 public:
  HttpSparqlClient(std::string queryUrl, std::string updateUrl,
                   int timeoutSeconds = 30);
  rdf::Graph construct(const std::string& query, const DatasetSpec& dataset) override;
  void update(const std::string& update) override;

 private:
  std::string queryUrl_;
  std::string updateUrl_;
  int timeoutSeconds_;
};

// Mounts `/sparql` (queries and updates) and `/update` on `server`.
void mountSparqlProtocol(Store& store, httplib::Server& server);

}  // namespace ontoapi::sparql
