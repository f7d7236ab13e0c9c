#include "ontoapi/gateway/gateway.h"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <limits>
#include <random>
#include <regex>

#include "ontoapi/rdf/vocab.h"

namespace ontoapi::gateway {

using compiler::ValidationError;
using nlohmann::json;
using templates::IriValue;
using templates::PlaceholderBinding;
using templates::TemplateKind;

namespace {

std::string fieldPath(const std::string& path, const std::string& field) {
  return path.empty() ? field : path + "." + field;
}

std::string dumpJson(const json& value) {
  return value.dump(-1, ' ', false, json::error_handler_t::replace);
}

Response jsonResponse(int status, const json& body) {
  return Response{.status = status, .body = dumpJson(body)};
}

Response errorResponse(int status, const std::string& message,
                       const std::optional<std::string>& field = std::nullopt) {
  json body = {{"error", message}};
  if (field && !field->empty()) body["field"] = *field;
  return jsonResponse(status, body);
}

Response methodNotAllowed(const std::string& allow) {
  auto response = errorResponse(405, "method not allowed");
  response.headers["Allow"] = allow;
  return response;
}

std::optional<std::string> param(const Request& request, const std::string& name) {
  auto it = request.params.find(name);
  if (it == request.params.end()) return std::nullopt;
  return it->second;
}

long long parseInteger(const std::string& text, const std::string& name) {
  static const std::regex integer("-?[0-9]{1,18}");
  if (!std::regex_match(text, integer)) throw ValidationError(name, "expected an integer");
  return std::stoll(text);
}

json parseBody(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ValidationError("", std::string("request body is not valid JSON: ") + e.what());
  }
}

std::vector<std::string> pageMembers(const rdf::Graph& graph) {
  std::vector<std::string> roots;
  for (const auto& t : graph.match(std::nullopt,
                                   rdf::Term::iri(std::string(vocab::kHydra) + "member"),
                                   std::nullopt)) {
    if (t.object.isIri()) roots.push_back(t.object.value);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

json toJsonArray(const std::vector<jsonld::ResourceEnvelope>& envelopes) {
  json out = json::array();
  for (const auto& e : envelopes) out.push_back(jsonld::toJson(e));
  return out;
}

}  // namespace

// ____________________________________________________________________________
std::string newUuid() {
  thread_local std::mt19937_64 engine{std::random_device{}()};
  std::uniform_int_distribution<std::uint64_t> dist;
  std::uint64_t hi = dist(engine);
  std::uint64_t lo = dist(engine);
  hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;
  lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;
  char buf[37];
  std::snprintf(buf, sizeof buf, "%08x-%04x-%04x-%04x-%012llx",
                static_cast<unsigned>(hi >> 32), static_cast<unsigned>((hi >> 16) & 0xFFFF),
                static_cast<unsigned>(hi & 0xFFFF), static_cast<unsigned>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf;
}

// ____________________________________________________________________________
Gateway::Gateway(GatewayConfig config, LoadedArtifacts artifacts,
                 std::shared_ptr<sparql::SparqlClient> client)
    : config_(std::move(config)), artifacts_(std::move(artifacts)), client_(std::move(client)) {
  std::vector<std::string> gaps;
  for (const auto& [segment, classIri] : artifacts_.paths.entries()) {
    const std::string* name = artifacts_.context.nameForIri(classIri);
    auto templatesIt = artifacts_.templates.find(segment);
    if (name == nullptr || !artifacts_.spec.schemas.contains(*name) ||
        templatesIt == artifacts_.templates.end()) {
      gaps.push_back("/" + segment + ": no schema or templates");
      continue;
    }
    routes_[segment] = ClassRoute{segment, classIri, *name, &templatesIt->second};
  }
  if (!gaps.empty()) throw ArtifactError(std::move(gaps));
  validator_ = [tokens = config_.tokens](const std::string& token) -> std::optional<std::string> {
    auto it = tokens.find(token);
    if (it == tokens.end()) return std::nullopt;
    return it->second;
  };
  logger_ = [](const std::string& message) { std::cerr << "warning: " << message << "\n"; };
}

// ____________________________________________________________________________
void Gateway::log(const std::string& message) const {
  if (logger_) logger_(message);
}

// ____________________________________________________________________________
UserIdentity Gateway::authenticate(const std::optional<std::string>& authorization,
                                   bool mutation) const {
  UserIdentity anonymous{"", config_.defaultGraph};
  if (config_.authMode == AuthMode::None) return anonymous;
  if (authorization) {
    static const std::regex bearer(R"(\s*[Bb][Ee][Aa][Rr][Ee][Rr]\s+(\S+)\s*)");
    std::smatch m;
    if (!std::regex_match(*authorization, m, bearer)) {
      throw AuthError("expected 'Authorization: Bearer <token>'");
    }
    auto username = validator_ ? validator_(m[1].str()) : std::nullopt;
    if (!username) throw AuthError("invalid token");
    return {*username, config_.graphBase + *username};
  }
  if (mutation) throw AuthError("authentication required");
  return anonymous;
}

// ____________________________________________________________________________
sparql::DatasetSpec Gateway::readScope(const UserIdentity& user) const {
  if (config_.readScope == ReadScope::OwnGraph) return {.defaultGraphs = {user.graph}};
  return {};
}

// ____________________________________________________________________________
std::mutex& Gateway::graphLock(const std::string& graph) {
  std::lock_guard lock(locksMutex_);
  auto& slot = locks_[graph];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

// ____________________________________________________________________________
const templates::QueryTemplate& Gateway::tmpl(const ClassRoute& route,
                                              TemplateKind kind) const {
  return route.templates->at(kind);
}

// ____________________________________________________________________________
Response Gateway::handle(const Request& request) {
  try {
    const std::string& method = request.method;
    bool mutation = method == "POST" || method == "PUT" || method == "DELETE";
    UserIdentity user = authenticate(request.authorization, mutation);

    std::string path = request.path;
    while (path.size() > 1 && path.back() == '/') path.pop_back();
    if (path == "/openapi.yaml") {
      if (method != "GET") return methodNotAllowed("GET");
      return Response{.contentType = "application/yaml", .body = artifacts_.specYaml};
    }
    if (path.size() < 2 || path.front() != '/') throw NotFoundError("no route " + path);
    if (auto it = artifacts_.custom.find(path); it != artifacts_.custom.end()) {
      if (method != "GET") return methodNotAllowed("GET");
      return custom(it->second, request, user);
    }
    auto slash = path.find('/', 1);
    std::string segment = path.substr(1, slash == std::string::npos ? slash : slash - 1);
    auto route = routes_.find(segment);
    if (route == routes_.end()) throw NotFoundError("no route " + path);
    if (slash == std::string::npos) {
      if (method == "GET") return getAll(route->second, request, user);
      if (method == "POST") return post(route->second, request, user);
      return methodNotAllowed("GET, POST");
    }
    std::string id = path.substr(slash + 1);
    if (method == "GET") return getById(route->second, id, user);
    if (method == "PUT") return put(route->second, id, request, user);
    if (method == "DELETE") return remove(route->second, id, user);
    return methodNotAllowed("GET, PUT, DELETE");
  } catch (const AuthError& e) {
    auto response = errorResponse(401, e.what());
    response.headers["WWW-Authenticate"] = "Bearer";
    return response;
  } catch (const ValidationError& e) {
    return errorResponse(400, e.message(), e.path());
  } catch (const templates::TemplateError& e) {
    return errorResponse(400, e.what());
  } catch (const NotFoundError& e) {
    return errorResponse(404, e.what());
  } catch (const sparql::EndpointError& e) {
    log(std::string("endpoint: ") + e.what());
    return errorResponse(502, std::string("SPARQL endpoint failure: ") + e.what());
  } catch (const std::exception& e) {
    log(std::string("internal: ") + e.what());
    return errorResponse(500, e.what());
  }
}

// ____________________________________________________________________________
Response Gateway::getAll(const ClassRoute& route, const Request& request,
                         const UserIdentity& user) {
  long long page = 1;
  long long perPage = compiler::kDefaultPerPage;
  if (auto v = param(request, "page")) page = parseInteger(*v, "page");
  if (auto v = param(request, "per_page")) perPage = parseInteger(*v, "per_page");
  if (page < 1) throw ValidationError("page", "must be at least 1");
  if (perPage < 1 || perPage > compiler::kMaxPerPage) {
    throw ValidationError("per_page",
                          "must be between 1 and " + std::to_string(compiler::kMaxPerPage));
  }
  if (page - 1 > std::numeric_limits<long long>::max() / perPage) {
    throw ValidationError("page", "too large");
  }
  std::vector<PlaceholderBinding> bindings{{"per_page_int", perPage},
                                           {"offset_int", (page - 1) * perPage}};
  if (auto label = param(request, "label")) bindings.push_back({"label", *label});
  auto query = templates::instantiate(tmpl(route, TemplateKind::GetAll), bindings);
  auto graph = client_->construct(query, readScope(user));
  Warnings warnings;
  auto envelopes = jsonld::frameRoots(graph, pageMembers(graph), artifacts_.context,
                                      config_.instancePrefix, &warnings);
  for (const auto& w : warnings) log(w);
  return jsonResponse(200, toJsonArray(envelopes));
}

// ____________________________________________________________________________
json Gateway::frameOne(const ClassRoute& route, const std::string& iri,
                       const sparql::DatasetSpec& dataset) {
  auto query = templates::instantiate(tmpl(route, TemplateKind::GetById),
                                      {{"resource_iri", IriValue{iri}}});
  auto graph = client_->construct(query, dataset);
  Warnings warnings;
  auto envelopes =
      jsonld::frameRoots(graph, {iri}, artifacts_.context, config_.instancePrefix, &warnings);
  for (const auto& w : warnings) log(w);
  if (envelopes.empty()) throw NotFoundError("no resource " + iri);
  return jsonld::toJson(envelopes.front());
}

// ____________________________________________________________________________
bool Gateway::exists(const ClassRoute& route, const std::string& iri, const std::string& graph) {
  auto query = templates::instantiate(tmpl(route, TemplateKind::GetById),
                                      {{"resource_iri", IriValue{iri}}});
  return !client_->construct(query, {.defaultGraphs = {graph}}).empty();
}

// ____________________________________________________________________________
Response Gateway::getById(const ClassRoute& route, const std::string& id,
                          const UserIdentity& user) {
  auto iri = jsonld::decodeId(id, config_.instancePrefix);
  return jsonResponse(200, frameOne(route, iri, readScope(user)));
}

// ____________________________________________________________________________
std::string Gateway::prepare(const json& node, const std::string& schemaName,
                             const std::string& path, std::vector<Pending>& pending) {
  if (!node.is_object()) throw ValidationError(path, "expected an object");
  const auto& schemas = artifacts_.spec.schemas;
  const auto& context = artifacts_.context;
  const compiler::SchemaObject& schema = schemas.at(schemaName);

  json copy = node;
  for (const auto& [key, field] : node.items()) {
    auto prop = schema.properties.find(key);
    if (prop == schema.properties.end() || prop->second.shape != compiler::ValueShape::ArrayOfRef ||
        !field.is_array()) {
      continue;
    }
    for (std::size_t i = 0; i < field.size(); ++i) {
      const json& item = field[i];
      if (!item.is_object()) continue;
      if (item.contains("id")) {
        copy[key][i] = json{{"id", item["id"]}};
        continue;
      }
      // An explicit type picks the schema, else the property's range.
      std::string target = prop->second.refTarget.value_or("");
      if (item.contains("type") && item["type"].is_array()) {
        for (const auto& t : item["type"]) {
          if (!t.is_string()) continue;
          std::string name = t.get<std::string>();
          if (const auto* byIri = context.nameForIri(name)) name = *byIri;
          const auto* term = context.term(name);
          if (term && term->kind == jsonld::TermKind::Class && schemas.contains(name)) {
            target = name;
            break;
          }
        }
      }
      std::string at = fieldPath(path, key) + "[" + std::to_string(i) + "]";
      copy[key][i] = json{{"id", prepare(item, target, at, pending)}};
    }
  }

  auto issues = compiler::validateResource(copy, schema, schemas, false, path);
  if (!issues.empty()) throw ValidationError(issues.front().path, issues.front().message);

  const std::string& classIri = context.term(schemaName)->iri;
  json& types = copy["type"];
  if (types.is_null()) types = json::array();
  if (std::find(types.begin(), types.end(), schemaName) == types.end() &&
      std::find(types.begin(), types.end(), classIri) == types.end()) {
    types.push_back(schemaName);
  }
  if (!copy.contains("id")) copy["id"] = newUuid();
  std::string id = copy["id"].get<std::string>();

  try {
    auto envelope = jsonld::envelopeFromJson(copy, context);
    pending.push_back({jsonld::decodeId(id, config_.instancePrefix),
                       jsonld::envelopeToTriples(envelope, context, config_.instancePrefix)});
  } catch (const ValidationError& e) {
    throw ValidationError(fieldPath(path, e.path()), e.message());
  }
  return id;
}

// ____________________________________________________________________________
Response Gateway::post(const ClassRoute& route, const Request& request,
                       const UserIdentity& user) {
  json body = parseBody(request.body);
  std::vector<Pending> pending;
  std::string id = prepare(body, route.schemaName, "", pending);
  {
    std::lock_guard lock(graphLock(user.graph));
    for (const auto& p : pending) {
      client_->update(templates::instantiate(
          tmpl(route, TemplateKind::Insert),
          {{"g_iri", IriValue{user.graph}}, {"resource_triples", p.triples}}));
    }
  }
  auto created = frameOne(route, pending.back().iri, {.defaultGraphs = {user.graph}});
  auto response = jsonResponse(201, created);
  response.headers["Location"] = "/" + route.segment + "/" + id;
  return response;
}

// ____________________________________________________________________________
Response Gateway::put(const ClassRoute& route, const std::string& id, const Request& request,
                      const UserIdentity& user) {
  json body = parseBody(request.body);
  if (!body.is_object()) throw ValidationError("", "expected an object");
  if (body.contains("id") && body["id"] != id) {
    throw ValidationError("id", "does not match the id in the path");
  }
  body["id"] = id;
  auto iri = jsonld::decodeId(id, config_.instancePrefix);
  {
    std::lock_guard lock(graphLock(user.graph));
    if (!exists(route, iri, user.graph)) throw NotFoundError("no resource " + iri);
    std::vector<Pending> pending;
    prepare(body, route.schemaName, "", pending);
    Pending root = std::move(pending.back());
    pending.pop_back();
    for (const auto& p : pending) {
      client_->update(templates::instantiate(
          tmpl(route, TemplateKind::Insert),
          {{"g_iri", IriValue{user.graph}}, {"resource_triples", p.triples}}));
    }
    client_->update(templates::instantiate(tmpl(route, TemplateKind::Update),
                                           {{"g_iri", IriValue{user.graph}},
                                            {"resource_iri", IriValue{iri}},
                                            {"resource_triples", root.triples}}));
  }
  return jsonResponse(200, frameOne(route, iri, {.defaultGraphs = {user.graph}}));
}

// ____________________________________________________________________________
Response Gateway::remove(const ClassRoute& route, const std::string& id,
                         const UserIdentity& user) {
  auto iri = jsonld::decodeId(id, config_.instancePrefix);
  std::lock_guard lock(graphLock(user.graph));
  if (!exists(route, iri, user.graph)) throw NotFoundError("no resource " + iri);
  client_->update(templates::instantiate(
      tmpl(route, TemplateKind::Delete),
      {{"g_iri", IriValue{user.graph}}, {"resource_iri", IriValue{iri}}}));
  return Response{.status = 204};
}

// ____________________________________________________________________________
Response Gateway::custom(const templates::CustomEndpoint& endpoint, const Request& request,
                         const UserIdentity& user) {
  std::vector<PlaceholderBinding> bindings;
  for (const auto& p : endpoint.query.placeholders) {
    std::string name = templates::parameterName(p);
    auto value = param(request, name);
    if (!value) {
      if (p.required) throw ValidationError(name, "missing required parameter");
      continue;
    }
    switch (p.type) {
      case templates::PlaceholderType::Iri:
        bindings.push_back({p.name, IriValue{jsonld::decodeId(*value, config_.instancePrefix)}});
        break;
      case templates::PlaceholderType::Integer:
        bindings.push_back({p.name, parseInteger(*value, name)});
        break;
      default:
        bindings.push_back({p.name, *value});
    }
  }
  auto graph = client_->construct(templates::instantiate(endpoint.query, bindings),
                                  readScope(user));
  auto roots = pageMembers(graph);
  Warnings warnings;
  auto envelopes =
      roots.empty()
          ? jsonld::frameResults(graph, endpoint.rootClass, std::nullopt, artifacts_.context,
                                 config_.instancePrefix, &warnings)
          : jsonld::frameRoots(graph, roots, artifacts_.context, config_.instancePrefix,
                               &warnings);
  for (const auto& w : warnings) log(w);
  return jsonResponse(200, toJsonArray(envelopes));
}

}  // namespace ontoapi::gateway
