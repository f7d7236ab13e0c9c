#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ontoapi/compiler/compiler.h"
#include "ontoapi/jsonld/bridge.h"
#include "ontoapi/templates/query_template.h"

namespace ontoapi::gateway {

inline constexpr const char* kSpecFile = "openapi.yaml";
inline constexpr const char* kContextFile = "context.jsonld";
inline constexpr const char* kPathsFile = "paths.map";
inline constexpr const char* kTemplatesDir = "templates";

struct GenerateOptions {
  compiler::CompileConfig compile;
  // `<dir>/<segment>/<name>.rq` files added to the spec as GET /<segment>/<name>.
  std::optional<std::filesystem::path> customQueryDir;
};

// Relative path -> file content.
using ArtifactFiles = std::map<std::string, std::string>;

ArtifactFiles generateArtifacts(const ontology::OntologyModel& model,
                                const GenerateOptions& options,
                                Warnings* warnings = nullptr);
void writeArtifacts(const ArtifactFiles& files, const std::filesystem::path& dir);

// Missing files and inconsistencies between the artifacts, one per entry.
class ArtifactError : public std::runtime_error {
 public:
  explicit ArtifactError(std::vector<std::string> gaps);
  const std::vector<std::string>& gaps() const { return gaps_; }

 private:
  std::vector<std::string> gaps_;
};

struct LoadedArtifacts {
  std::string specYaml;  // served verbatim
  compiler::ApiSpecDocument spec;
  jsonld::ContextMap context;
  jsonld::PathClassTable paths;
  // segment -> kind -> template
  std::map<std::string, std::map<templates::TemplateKind, templates::QueryTemplate>>
      templates;
  std::map<std::string, templates::CustomEndpoint> custom;  // by route
};

// The class of a custom query comes from a `#+ class:` decorator (local name
// or IRI) or else from its directory's segment. Throws TemplateError,
// DecoratorError or ArtifactError.
std::vector<templates::CustomEndpoint> loadCustomQueries(
    const std::filesystem::path& dir, const jsonld::PathClassTable& paths,
    const jsonld::ContextMap& context, const std::set<std::string>& existingRoutes);

// Every spec route needs its path mapping, class term, schema and templates;
// every mapped segment needs its two routes.
std::vector<std::string> consistencyGaps(const LoadedArtifacts& artifacts);

// Reads and cross-checks an artifact directory. Throws ArtifactError listing
// every gap.
LoadedArtifacts loadArtifacts(const std::filesystem::path& dir,
                              const std::optional<std::filesystem::path>& customQueryDir);

}  // namespace ontoapi::gateway
