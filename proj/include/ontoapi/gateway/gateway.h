#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ontoapi/gateway/artifacts.h"
#include "ontoapi/gateway/config.h"
#include "ontoapi/sparql/client.h"

namespace httplib {
class Server;
}

namespace ontoapi::gateway {

struct Request {
  std::string method;
  std::string path;  // percent-decoded
  std::multimap<std::string, std::string> params;
  std::optional<std::string> authorization;
  std::string body;
};

struct Response {
  int status = 200;
  std::string contentType = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

struct UserIdentity {
  std::string username;  // empty for anonymous requests
  std::string graph;

  bool anonymous() const { return username.empty(); }
};

class AuthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Maps a bearer token to a username, or nullopt when it is not valid.
using TokenValidator = std::function<std::optional<std::string>(const std::string&)>;

std::string newUuid();

class Gateway {
 public:
  // Throws ArtifactError when a class route has no schema or templates.
  Gateway(GatewayConfig config, LoadedArtifacts artifacts,
          std::shared_ptr<sparql::SparqlClient> client);

  Response handle(const Request& request);

  // Anonymous reads are allowed in every mode; mutations need a valid token
  // in static-token mode. A token that does not validate is always rejected.
  // Throws AuthError.
  UserIdentity authenticate(const std::optional<std::string>& authorization,
                            bool mutation) const;
  sparql::DatasetSpec readScope(const UserIdentity& user) const;

  // Replaces the static token table.
  void setTokenValidator(TokenValidator validator) { validator_ = std::move(validator); }
  void setLogger(std::function<void(const std::string&)> logger) {
    logger_ = std::move(logger);
  }

  const GatewayConfig& config() const { return config_; }
  const LoadedArtifacts& artifacts() const { return artifacts_; }

 private:
  struct ClassRoute {
    std::string segment;
    std::string classIri;
    std::string schemaName;
    const std::map<templates::TemplateKind, templates::QueryTemplate>* templates;
  };
  struct Pending {
    std::string iri;
    std::vector<rdf::Triple> triples;
  };

  Response getAll(const ClassRoute& route, const Request& request, const UserIdentity& user);
  Response getById(const ClassRoute& route, const std::string& id, const UserIdentity& user);
  Response post(const ClassRoute& route, const Request& request, const UserIdentity& user);
  Response put(const ClassRoute& route, const std::string& id, const Request& request,
               const UserIdentity& user);
  Response remove(const ClassRoute& route, const std::string& id, const UserIdentity& user);
  Response custom(const templates::CustomEndpoint& endpoint, const Request& request,
                  const UserIdentity& user);

  // Validates a request body (nested id-less objects first) and queues the
  // triples of every new resource in insertion order. Returns the id.
  std::string prepare(const nlohmann::json& node, const std::string& schemaName,
                      const std::string& path, std::vector<Pending>& pending);
  bool exists(const ClassRoute& route, const std::string& iri, const std::string& graph);
  nlohmann::json frameOne(const ClassRoute& route, const std::string& iri,
                          const sparql::DatasetSpec& dataset);
  const templates::QueryTemplate& tmpl(const ClassRoute& route,
                                       templates::TemplateKind kind) const;
  std::mutex& graphLock(const std::string& graph);
  void log(const std::string& message) const;

  GatewayConfig config_;
  LoadedArtifacts artifacts_;
  std::shared_ptr<sparql::SparqlClient> client_;
  std::map<std::string, ClassRoute> routes_;  // by segment
  TokenValidator validator_;
  std::function<void(const std::string&)> logger_;
  std::mutex locksMutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

// Routes every request on `server` through the gateway.
void mountGateway(Gateway& gateway, httplib::Server& server);

// Binds config.host:config.port and serves until SIGINT/SIGTERM. Returns a
// process exit code; binding failures return 1.
int runServer(Gateway& gateway);

}  // namespace ontoapi::gateway
