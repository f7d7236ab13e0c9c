#include "ontoapi/gateway/artifacts.h"

#include <fstream>
#include <sstream>

namespace ontoapi::gateway {

namespace fs = std::filesystem;
using templates::TemplateKind;

namespace {

std::string joinGaps(const std::vector<std::string>& gaps) {
  std::string out = "inconsistent artifacts:";
  for (const auto& gap : gaps) out += "\n  " + gap;
  return out;
}

std::optional<std::string> readFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string templatePath(const std::string& segment, TemplateKind kind) {
  return std::string(kTemplatesDir) + "/" + segment + "/" +
         std::string(templates::toString(kind)) + ".rq";
}

// Placeholders the gateway binds for each generated template.
std::set<std::string> boundPlaceholders(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::GetAll:
      return {"per_page_int", "offset_int", "label"};
    case TemplateKind::GetById:
      return {"resource_iri"};
    case TemplateKind::Insert:
      return {"g_iri", "resource_triples"};
    case TemplateKind::Update:
      return {"g_iri", "resource_iri", "resource_triples"};
    case TemplateKind::Delete:
      return {"g_iri", "resource_iri"};
    case TemplateKind::Custom:
      break;
  }
  return {};
}

std::string schemaNameFor(const jsonld::ContextMap& context, const std::string& classIri) {
  const std::string* name = context.nameForIri(classIri);
  if (name == nullptr || context.term(*name)->kind != jsonld::TermKind::Class) {
    throw ArtifactError({"class <" + classIri + "> has no term in the context"});
  }
  return *name;
}

}  // namespace

// ____________________________________________________________________________
ArtifactError::ArtifactError(std::vector<std::string> gaps)
    : std::runtime_error(joinGaps(gaps)), gaps_(std::move(gaps)) {}

// ____________________________________________________________________________
ArtifactFiles generateArtifacts(const ontology::OntologyModel& model,
                                const GenerateOptions& options, Warnings* warnings) {
  const auto& compile = options.compile;
  auto spec = compiler::compileSpec(model, compile, warnings);
  auto included = compiler::selectClasses(model, compile.filter, compile.includeUndomained);
  auto context = jsonld::generateContext(model, included, compile.includeUndomained, warnings);
  auto paths = jsonld::buildPathTable(model, included);

  ArtifactFiles files;
  for (const auto& [segment, classIri] : paths.entries()) {
    for (const auto& tmpl : templates::generateDefaultTemplates(model.classInfo(classIri))) {
      files[templatePath(segment, tmpl.kind)] = templates::renderRq(tmpl);
    }
  }
  if (options.customQueryDir) {
    std::set<std::string> routes;
    for (const auto& [route, item] : spec.paths) routes.insert(route);
    for (const auto& endpoint : loadCustomQueries(*options.customQueryDir, paths, context, routes)) {
      spec.paths[endpoint.route] =
          templates::customPathItem(endpoint, schemaNameFor(context, endpoint.rootClass));
    }
  }
  files[kSpecFile] = compiler::serializeSpec(spec);
  files[kContextFile] = jsonld::toJson(context).dump(2) + "\n";
  files[kPathsFile] = jsonld::serializePathTable(paths);
  return files;
}

// ____________________________________________________________________________
void writeArtifacts(const ArtifactFiles& files, const fs::path& dir) {
  for (const auto& [relative, content] : files) {
    fs::path target = dir / relative;
    fs::create_directories(target.parent_path());
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error(target.string() + ": cannot write");
  }
}

// ____________________________________________________________________________
std::vector<templates::CustomEndpoint> loadCustomQueries(
    const fs::path& dir, const jsonld::PathClassTable& paths,
    const jsonld::ContextMap& context, const std::set<std::string>& existingRoutes) {
  if (!fs::is_directory(dir)) throw ArtifactError({dir.string() + ": not a directory"});
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".rq") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<std::string> gaps;
  std::vector<templates::CustomEndpoint> endpoints;
  std::set<std::string> routes = existingRoutes;
  for (const auto& file : files) {
    auto relative = fs::relative(file, dir);
    std::vector<std::string> parts;
    for (const auto& part : relative) parts.push_back(part.string());
    if (parts.size() != 2) {
      gaps.push_back(file.string() + ": expected <segment>/<name>.rq");
      continue;
    }
    const std::string& segment = parts[0];
    std::string name = file.stem().string();
    std::string route = "/" + segment + "/" + name;
    try {
      auto tmpl = templates::makeTemplate(name, TemplateKind::Custom, *readFile(file));
      std::string classIri;
      if (auto it = tmpl.metadata.find("class"); it != tmpl.metadata.end()) {
        const auto* term = context.term(it->second);
        const auto* byIri = context.nameForIri(it->second);
        if (term != nullptr && term->kind == jsonld::TermKind::Class) {
          classIri = term->iri;
        } else if (byIri != nullptr && context.term(*byIri)->kind == jsonld::TermKind::Class) {
          classIri = it->second;
        } else {
          gaps.push_back(file.string() + ": unknown class '" + it->second + "'");
          continue;
        }
      } else if (const auto* mapped = paths.classFor(segment)) {
        classIri = *mapped;
      } else {
        gaps.push_back(file.string() + ": segment '" + segment +
                       "' is not a class route; add a '#+ class:' decorator");
        continue;
      }
      endpoints.push_back(templates::registerCustomQuery(route, classIri, std::move(tmpl), routes));
      routes.insert(route);
    } catch (const std::exception& e) {
      gaps.push_back(file.string() + ": " + e.what());
    }
  }
  if (!gaps.empty()) throw ArtifactError(std::move(gaps));
  return endpoints;
}

// ____________________________________________________________________________
std::vector<std::string> consistencyGaps(const LoadedArtifacts& a) {
  std::vector<std::string> gaps;
  auto classChecks = [&](const std::string& route, const std::string& segment) {
    const std::string* classIri = a.paths.classFor(segment);
    if (classIri == nullptr) {
      gaps.push_back("route " + route + ": segment '" + segment + "' missing from " +
                     kPathsFile);
      return;
    }
    const std::string* name = a.context.nameForIri(*classIri);
    if (name == nullptr || a.context.term(*name)->kind != jsonld::TermKind::Class) {
      gaps.push_back("route " + route + ": class <" + *classIri + "> missing from " +
                     kContextFile);
    } else if (!a.spec.schemas.contains(*name)) {
      gaps.push_back("route " + route + ": schema " + *name + " missing from " + kSpecFile);
    }
  };
  auto templateChecks = [&](const std::string& route, const std::string& segment,
                            std::initializer_list<TemplateKind> kinds) {
    auto bySegment = a.templates.find(segment);
    for (auto kind : kinds) {
      if (bySegment == a.templates.end() || !bySegment->second.contains(kind)) {
        gaps.push_back("route " + route + ": missing template " + templatePath(segment, kind));
        continue;
      }
      auto bound = boundPlaceholders(kind);
      for (const auto& p : bySegment->second.at(kind).placeholders) {
        if (!bound.contains(p.name)) {
          gaps.push_back("route " + route + ": " + templatePath(segment, kind) +
                         " uses unsupported placeholder ?_" + p.name);
        }
      }
    }
  };

  for (const auto& [route, item] : a.spec.paths) {
    if (a.custom.contains(route)) continue;
    auto slash = route.find('/', 1);
    std::string segment = route.substr(1, slash == std::string::npos ? slash : slash - 1);
    if (route == "/" + segment) {
      classChecks(route, segment);
      templateChecks(route, segment, {TemplateKind::GetAll, TemplateKind::Insert});
    } else if (route == "/" + segment + "/{id}") {
      templateChecks(route, segment,
                     {TemplateKind::GetById, TemplateKind::Update, TemplateKind::Delete});
    } else {
      gaps.push_back("route " + route + ": no custom query file");
    }
  }
  for (const auto& [segment, classIri] : a.paths.entries()) {
    for (const auto& route : {"/" + segment, "/" + segment + "/{id}"}) {
      if (!a.spec.paths.contains(route)) {
        gaps.push_back(std::string(kPathsFile) + ": no route " + route + " in " + kSpecFile);
      }
    }
  }
  return gaps;
}

// ____________________________________________________________________________
LoadedArtifacts loadArtifacts(const fs::path& dir,
                              const std::optional<fs::path>& customQueryDir) {
  LoadedArtifacts a;
  std::vector<std::string> gaps;
  auto read = [&](const char* name) {
    auto text = readFile(dir / name);
    if (!text) gaps.push_back((dir / name).string() + ": missing");
    return text;
  };
  auto specText = read(kSpecFile);
  auto contextText = read(kContextFile);
  auto pathsText = read(kPathsFile);
  try {
    if (specText) {
      a.specYaml = *specText;
      a.spec = compiler::parseSpec(*specText);
    }
  } catch (const std::exception& e) {
    gaps.push_back(std::string(kSpecFile) + ": " + e.what());
  }
  try {
    if (contextText) a.context = jsonld::contextFromJson(nlohmann::json::parse(*contextText));
  } catch (const std::exception& e) {
    gaps.push_back(std::string(kContextFile) + ": " + e.what());
  }
  try {
    if (pathsText) a.paths = jsonld::parsePathTable(*pathsText);
  } catch (const std::exception& e) {
    gaps.push_back(std::string(kPathsFile) + ": " + e.what());
  }
  if (!gaps.empty()) throw ArtifactError(std::move(gaps));

  for (const auto& [segment, classIri] : a.paths.entries()) {
    for (auto kind : templates::kDefaultKinds) {
      auto path = templatePath(segment, kind);
      auto text = readFile(dir / path);
      if (!text) continue;
      try {
        a.templates[segment][kind] =
            templates::makeTemplate(std::string(templates::toString(kind)), kind, *text);
      } catch (const std::exception& e) {
        gaps.push_back(path + ": " + e.what());
      }
    }
  }
  if (customQueryDir) {
    std::set<std::string> routes;
    for (const auto& [segment, classIri] : a.paths.entries()) {
      routes.insert("/" + segment);
      routes.insert("/" + segment + "/{id}");
    }
    try {
      for (auto& endpoint : loadCustomQueries(*customQueryDir, a.paths, a.context, routes)) {
        a.custom.emplace(endpoint.route, std::move(endpoint));
      }
    } catch (const ArtifactError& e) {
      gaps.insert(gaps.end(), e.gaps().begin(), e.gaps().end());
    }
  }
  auto more = consistencyGaps(a);
  gaps.insert(gaps.end(), more.begin(), more.end());
  if (!gaps.empty()) throw ArtifactError(std::move(gaps));
  return a;
}

}  // namespace ontoapi::gateway
