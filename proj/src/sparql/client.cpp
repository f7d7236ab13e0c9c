#include "ontoapi/sparql/client.h"

#include <httplib.h>

#include <regex>

#include "ontoapi/rdf/jsonld_io.h"
#include "ontoapi/rdf/turtle.h"
#include "ontoapi/sparql/parser.h"

namespace ontoapi::sparql {

namespace {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

UrlParts splitUrl(const std::string& url) {
  static const std::regex kUrl(R"(^(https?://[^/?#]+)([^#]*)$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) {
    throw EndpointError("malformed endpoint URL " + url);
  }
  std::string path = m[2].str();
  if (path.empty()) path = "/";
  return {m[1].str(), path};
}

std::unique_ptr<httplib::Client> connect(const std::string& origin, int timeout) {
  auto client = std::make_unique<httplib::Client>(origin);
  client->set_connection_timeout(timeout, 0);
  client->set_read_timeout(timeout, 0);
  client->set_write_timeout(timeout, 0);
  client->set_follow_location(true);
  return client;
}

std::string datasetQuery(const DatasetSpec& dataset) {
  std::string out;
  auto add = [&](const char* key, const std::string& value) {
    out += out.empty() ? "" : "&";
    out += key;
    out += "=" + httplib::detail::encode_query_param(value);
  };
  for (const auto& g : dataset.defaultGraphs) add("default-graph-uri", g);
  for (const auto& g : dataset.namedGraphs) add("named-graph-uri", g);
  return out;
}

std::string describeFailure(const httplib::Result& result, const std::string& url) {
  if (!result) {
    return "endpoint " + url + " unreachable: " + httplib::to_string(result.error());
  }
  std::string body = result->body.substr(0, 300);
  return "endpoint " + url + " answered " + std::to_string(result->status) +
         (body.empty() ? "" : ": " + body);
}

std::vector<std::string> paramValues(const httplib::Request& req, const std::string& key) {
  std::vector<std::string> out;
  auto range = req.params.equal_range(key);
  for (auto it = range.first; it != range.second; ++it) out.push_back(it->second);
  return out;
}

void answerQuery(Store& store, const std::string& text, const httplib::Request& req,
                 httplib::Response& res) {
  DatasetSpec spec{paramValues(req, "default-graph-uri"),
                   paramValues(req, "named-graph-uri")};
  QueryResult result;
  try {
    result = store.query(text, spec);
  } catch (const rdf::SyntaxError& e) {
    res.status = 400;
    res.set_content(e.what(), "text/plain");
    return;
  } catch (const std::exception& e) {
    res.status = 500;
    res.set_content(e.what(), "text/plain");
    return;
  }
  if (result.form != QueryForm::Construct) {
    res.set_content(toResultsJson(result).dump(), "application/sparql-results+json");
    return;
  }
  auto accept = req.get_header_value("Accept");
  bool wantsJsonLd = accept.find("application/ld+json") != std::string::npos &&
                     accept.find("n-triples") == std::string::npos &&
                     accept.find("turtle") == std::string::npos;
  if (wantsJsonLd) {
    res.set_content(rdf::toExpandedJsonLd(result.graph).dump(), "application/ld+json");
  } else {
    res.set_content(rdf::toNTriples(result.graph), "application/n-triples");
  }
}

void answerUpdate(Store& store, const std::string& text, httplib::Response& res) {
  try {
    store.update(text);
    res.status = 204;
  } catch (const rdf::SyntaxError& e) {
    res.status = 400;
    res.set_content(e.what(), "text/plain");
  } catch (const std::exception& e) {
    res.status = 500;
    res.set_content(e.what(), "text/plain");
  }
}

}  // namespace

// ____________________________________________________________________________
rdf::Graph EmbeddedSparqlClient::construct(const std::string& query,
                                           const DatasetSpec& dataset) {
  try {
    auto result = store_.query(query, dataset);
    if (result.form != QueryForm::Construct) {
      throw EndpointError("query is not a CONSTRUCT query");
    }
    return std::move(result.graph);
  } catch (const rdf::SyntaxError& e) {
    throw EndpointError(std::string("endpoint rejected query: ") + e.what());
  } catch (const EvaluationError& e) {
    throw EndpointError(std::string("endpoint failed: ") + e.what());
  }
}

// ____________________________________________________________________________
void EmbeddedSparqlClient::update(const std::string& update) {
  try {
    store_.update(update);
  } catch (const rdf::SyntaxError& e) {
    throw EndpointError(std::string("endpoint rejected update: ") + e.what());
  } catch (const EvaluationError& e) {
    throw EndpointError(std::string("endpoint failed: ") + e.what());
  }
}

// ____________________________________________________________________________
HttpSparqlClient::HttpSparqlClient(std::string queryUrl, std::string updateUrl,
                                   int timeoutSeconds)
    : queryUrl_(std::move(queryUrl)),
      updateUrl_(std::move(updateUrl)),
      timeoutSeconds_(timeoutSeconds) {
  splitUrl(queryUrl_);
  splitUrl(updateUrl_);
}

// ____________________________________________________________________________
rdf::Graph HttpSparqlClient::construct(const std::string& query,
                                       const DatasetSpec& dataset) {
  auto [origin, path] = splitUrl(queryUrl_);
  auto params = datasetQuery(dataset);
  if (!params.empty()) path += (path.find('?') == std::string::npos ? "?" : "&") + params;
  auto client = connect(origin, timeoutSeconds_);
  httplib::Headers headers{
      {"Accept",
       "application/n-triples, text/turtle;q=0.9, application/ld+json;q=0.8"}};
  auto result = client->Post(path, headers, query, "application/sparql-query");
  if (!result || result->status / 100 != 2) {
    throw EndpointError(describeFailure(result, queryUrl_));
  }
  auto type = result->get_header_value("Content-Type");
  try {
    if (type.find("json") != std::string::npos) {
      return rdf::parseJsonLd(nlohmann::json::parse(result->body));
    }
    return rdf::parseTurtle(result->body).dataset.defaultGraph;
  } catch (const std::exception& e) {
    throw EndpointError("unreadable CONSTRUCT result from " + queryUrl_ + ": " +
                        e.what());
  }
}

// ____________________________________________________________________________
void HttpSparqlClient::update(const std::string& update) {
  auto [origin, path] = splitUrl(updateUrl_);
  auto client = connect(origin, timeoutSeconds_);
  auto result = client->Post(path, update, "application/sparql-update");
  if (!result || result->status / 100 != 2) {
    throw EndpointError(describeFailure(result, updateUrl_));
  }
}

// ____________________________________________________________________________
void mountSparqlProtocol(Store& store, httplib::Server& server) {
  server.Get("/sparql", [&store](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("query")) {
      res.status = 400;
      res.set_content("missing query parameter", "text/plain");
      return;
    }
    answerQuery(store, req.get_param_value("query"), req, res);
  });
  auto post = [&store](const httplib::Request& req, httplib::Response& res) {
    auto type = req.get_header_value("Content-Type");
    if (type.starts_with("application/sparql-query")) {
      answerQuery(store, req.body, req, res);
    } else if (type.starts_with("application/sparql-update")) {
      answerUpdate(store, req.body, res);
    } else if (req.has_param("query")) {
      answerQuery(store, req.get_param_value("query"), req, res);
    } else if (req.has_param("update")) {
      answerUpdate(store, req.get_param_value("update"), res);
    } else {
      res.status = 400;
      res.set_content("expected a query or update", "text/plain");
    }
  };
  server.Post("/sparql", post);
  server.Post("/update", post);
}

}  // namespace ontoapi::sparql
