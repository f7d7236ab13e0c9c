// Small SPARQL 1.1 protocol server backed by the in-memory store. Used for
// local development and by the gateway integration tests.

#include <httplib.h>

#include <CLI11.hpp>
#include <csignal>
#include <iostream>

#include "ontoapi/ontology/model.h"
#include "ontoapi/rdf/rdfxml.h"
#include "ontoapi/rdf/turtle.h"
#include "ontoapi/sparql/client.h"

using namespace ontoapi;

namespace {

httplib::Server* gServer = nullptr;

rdf::Dataset readDataset(const std::string& path) {
  auto source = ontology::readSource(path);
  auto doc = source.syntax == ontology::Syntax::RdfXml
                 ? rdf::parseRdfXml(source.content, "file://" + path)
                 : rdf::parseTurtle(source.content, "file://" + path);
  return std::move(doc.dataset);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-memory SPARQL endpoint"};
  std::string host = "127.0.0.1";
  int port = 3030;
  std::vector<std::string> files;
  std::vector<std::string> graphFiles;
  app.add_option("--host", host, "Bind address");
  app.add_option("-p,--port", port, "Port (0 picks a free one)");
  app.add_option("files", files, "Turtle, TriG, N-Triples, or RDF/XML files")
      ->check(CLI::ExistingFile);
  app.add_option("-g,--graph", graphFiles,
                 "Load a file into a named graph, given as <graph-iri>=<file>");
  CLI11_PARSE(app, argc, argv);

  sparql::Store store;
  try {
    for (const auto& f : files) store.load(readDataset(f));
    for (const auto& spec : graphFiles) {
      auto eq = spec.find('=');
      if (eq == std::string::npos) {
        std::cerr << "--graph expects <graph-iri>=<file>: " << spec << "\n";
        return 2;
      }
      auto data = readDataset(spec.substr(eq + 1));
      rdf::Dataset named;
      named.namedGraphs[spec.substr(0, eq)] = std::move(data.defaultGraph);
      store.load(named);
      data.defaultGraph.clear();
      store.load(data);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  httplib::Server server;
  sparql::mountSparqlProtocol(store, server);
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  gServer = &server;
  std::signal(SIGINT, [](int) { gServer->stop(); });
  std::signal(SIGTERM, [](int) { gServer->stop(); });
  if (port == 0) {
    port = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    std::cerr << "error: cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  for (const auto& [graph, size] : store.graphSizes()) {
    std::cerr << (graph.empty() ? "(default)" : graph) << ": " << size << " triples\n";
  }
  std::cout << "listening on http://" << host << ":" << port << "/sparql" << std::endl;
  server.listen_after_bind();
  return 0;
}
