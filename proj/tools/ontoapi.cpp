// ontoapi: compile ontologies into API artifacts, serve them, and check a
// running server against its spec.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "ontoapi/cli/conformance.h"
#include "ontoapi/gateway/gateway.h"

using namespace ontoapi;

namespace {

struct GenerateArgs {
  std::vector<std::string> sources;
  std::vector<std::string> filter;
  bool includeUndomained = false;
  std::string output;
  std::string customQueries;
  std::string title = "Ontology API";
  std::string apiVersion = "1.0.0";
};

struct ServeArgs {
  std::string config;
  bool checkOnly = false;
};

struct CheckArgs {
  std::string base;
  std::string spec;
  std::string report;
  int concurrency = 8;
  int timeout = 30;
};

void printWarnings(const Warnings& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// ____________________________________________________________________________
int generate(const GenerateArgs& args) {
  try {
    std::vector<ontology::SourceDocument> docs;
    for (const auto& source : args.sources) docs.push_back(ontology::readSource(source));
    Warnings warnings;
    auto model = ontology::loadOntology(docs, &warnings);

    gateway::GenerateOptions options;
    options.compile.includeUndomained = args.includeUndomained;
    options.compile.title = args.title;
    options.compile.version = args.apiVersion;
    if (!args.filter.empty()) options.compile.filter = compiler::resolveFilter(model, args.filter);
    if (!args.customQueries.empty()) options.customQueryDir = args.customQueries;

    auto files = gateway::generateArtifacts(model, options, &warnings);
    printWarnings(warnings);
    gateway::writeArtifacts(files, args.output);
    auto spec = compiler::parseSpec(files.at(gateway::kSpecFile));
    std::cout << spec.schemas.size() << " schemas, " << spec.paths.size()
              << " routes written to " << args.output << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

// ____________________________________________________________________________
int serve(const ServeArgs& args) {
  try {
    auto config = gateway::loadConfig(args.config);
    auto artifacts = gateway::loadArtifacts(config.artifactsDir, config.customQueryDir);
    if (args.checkOnly) {
      std::cout << "artifacts in " << config.artifactsDir.string() << " are consistent: "
                << artifacts.spec.paths.size() << " routes\n";
      return 0;
    }
    auto client = std::make_shared<sparql::HttpSparqlClient>(config.endpointQueryUrl,
                                                             config.endpointUpdateUrl);
    gateway::Gateway gw(config, std::move(artifacts), client);
    return gateway::runServer(gw);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

// ____________________________________________________________________________
int check(const CheckArgs& args) {
  compiler::ApiSpecDocument spec;
  try {
    std::ifstream in(args.spec, std::ios::binary);
    if (!in) throw std::runtime_error(args.spec + ": cannot read");
    spec = compiler::parseSpec({std::istreambuf_iterator<char>(in), {}});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    auto report = cli::runConformance(args.base, spec, args.concurrency, args.timeout);
    std::cout << cli::toTable(report);
    if (!args.report.empty()) {
      std::ofstream out(args.report, std::ios::binary | std::ios::trunc);
      out << cli::toJsonLines(report);
      if (!out) {
        std::cerr << "error: cannot write " << args.report << "\n";
        return 1;
      }
    }
    return report.ok() ? 0 : 1;
  } catch (const cli::UnreachableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ontology-driven REST API compiler and gateway"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generateCmd = app.add_subcommand("generate", "Compile ontologies into API artifacts");
  generateCmd->add_option("sources", gen.sources, "Ontology files or URLs")->required();
  generateCmd->add_option("--filter", gen.filter, "Classes to expose (local names or IRIs)");
  generateCmd->add_flag("--include-undomained", gen.includeUndomained,
                        "Give properties without a domain to every class");
  generateCmd->add_option("-o,--output", gen.output, "Output directory")->required();
  generateCmd->add_option("--custom-queries", gen.customQueries,
                          "Directory of <segment>/<name>.rq queries")
      ->check(CLI::ExistingDirectory);
  generateCmd->add_option("--title", gen.title, "API title");
  generateCmd->add_option("--api-version", gen.apiVersion, "API version");

  ServeArgs srv;
  auto* serveCmd = app.add_subcommand("serve", "Serve artifacts against a SPARQL endpoint");
  serveCmd->add_option("-c,--config", srv.config, "Gateway configuration (YAML)")->required();
  serveCmd->add_flag("--check-only", srv.checkOnly, "Validate config and artifacts, then exit");

  CheckArgs chk;
  auto* checkCmd = app.add_subcommand("check", "Run the GET conformance suite");
  checkCmd->add_option("--base", chk.base, "Base URL of the running API")->required();
  checkCmd->add_option("--spec", chk.spec, "openapi.yaml of the API")->required();
  checkCmd->add_option("--report", chk.report, "Write JSON lines report here");
  checkCmd->add_option("--concurrency", chk.concurrency, "Requests in flight")
      ->check(CLI::Range(1, 64));
  checkCmd->add_option("--timeout", chk.timeout, "Per-request timeout in seconds")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  if (*generateCmd) return generate(gen);
  if (*serveCmd) return serve(srv);
  return check(chk);
}
