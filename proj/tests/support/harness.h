#pragma once

// In-process gateway over an embedded store, shared by the gateway tests and
// the acceptance suite.

#include <atomic>
#include <filesystem>
#include <mutex>
#include <random>
#include <string>

#include "ontoapi/gateway/gateway.h"
#include "ontoapi/rdf/turtle.h"

namespace ontoapi::testing {

inline const std::string kInstancePrefix = "https://ex.org/i/";
inline const std::string kGraphBase = "https://ex.org/g/";
inline const std::string kDefaultGraph = "https://ex.org/g/anonymous";
inline const std::string kRegionNs = "https://w3id.org/example/regions#";

inline std::filesystem::path fixturePath(const std::string& file) {
  return std::filesystem::path(ONTOAPI_TEST_DATA) / file;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ontoapi-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Embedded client that records updates and can be told to fail.
class RecordingClient : public sparql::SparqlClient {
 public:
  explicit RecordingClient(sparql::Store& store) : inner_(store) {}

  rdf::Graph construct(const std::string& query, const sparql::DatasetSpec& dataset) override {
    if (failing) throw sparql::EndpointError("connection refused");
    return inner_.construct(query, dataset);
  }
  void update(const std::string& text) override {
    if (failing) throw sparql::EndpointError("connection refused");
    {
      std::lock_guard lock(mutex_);
      updates_.push_back(text);
    }
    inner_.update(text);
  }
  std::vector<std::string> updates() const {
    std::lock_guard lock(mutex_);
    return updates_;
  }
  void clearUpdates() {
    std::lock_guard lock(mutex_);
    updates_.clear();
  }

  std::atomic<bool> failing{false};

 private:
  sparql::EmbeddedSparqlClient inner_;
  mutable std::mutex mutex_;
  std::vector<std::string> updates_;
};

struct HarnessOptions {
  std::vector<std::string> ontologies = {"region.ttl"};
  gateway::AuthMode authMode = gateway::AuthMode::StaticToken;
  gateway::ReadScope readScope = gateway::ReadScope::AllGraphs;
  std::optional<std::filesystem::path> customQueries;
};

struct HttpResult {
  int status = 0;
  nlohmann::json body;
  gateway::Response raw;
};

class Harness {
 public:
  explicit Harness(HarnessOptions options = {}) {
    std::vector<ontology::SourceDocument> docs;
    for (const auto& file : options.ontologies) {
      docs.push_back(ontology::readSource(fixturePath(file).string()));
    }
    model = ontology::loadOntology(docs);
    gateway::GenerateOptions generate;
    generate.customQueryDir = options.customQueries;
    gateway::writeArtifacts(gateway::generateArtifacts(model, generate), dir.path());

    config.endpointQueryUrl = "http://embedded/sparql";
    config.endpointUpdateUrl = "http://embedded/update";
    config.instancePrefix = kInstancePrefix;
    config.graphBase = kGraphBase;
    config.defaultGraph = kDefaultGraph;
    config.authMode = options.authMode;
    config.tokens = {{"t1", "alice"}, {"t2", "bob"}};
    config.readScope = options.readScope;
    config.customQueryDir = options.customQueries;
    config.artifactsDir = dir.path();

    client = std::make_shared<RecordingClient>(store);
    gw = std::make_unique<gateway::Gateway>(
        config, gateway::loadArtifacts(dir.path(), options.customQueries), client);
    gw->setLogger([](const std::string&) {});
  }

  void seed(const std::string& turtle) { store.load(rdf::parseTurtle(turtle).dataset); }

  HttpResult call(const std::string& method, const std::string& path,
                  const std::optional<std::string>& token = std::nullopt,
                  const std::string& body = "",
                  std::multimap<std::string, std::string> params = {}) {
    gateway::Request request{.method = method, .path = path, .params = std::move(params),
                             .body = body};
    if (token) request.authorization = "Bearer " + *token;
    HttpResult result;
    result.raw = gw->handle(request);
    result.status = result.raw.status;
    if (result.raw.contentType == "application/json" && !result.raw.body.empty()) {
      result.body = nlohmann::json::parse(result.raw.body);
    }
    return result;
  }

  std::map<std::string, std::size_t> graphSizes() const { return store.graphSizes(); }

  TempDir dir;
  ontology::OntologyModel model;
  gateway::GatewayConfig config;
  sparql::Store store;
  std::shared_ptr<RecordingClient> client;
  std::unique_ptr<gateway::Gateway> gw;
};

// Texas, USA and Europe in the default graph.
inline constexpr const char* kRegionSeed = R"(
@prefix r: <https://w3id.org/example/regions#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix i: <https://ex.org/i/> .
i:Texas a r:Region ; rdfs:label "Texas" ; r:partOfRegion i:USA .
i:USA a r:Region ; rdfs:label "USA" .
i:Europe a r:Region ; rdfs:label "Europe" .
)";

}  // namespace ontoapi::testing
