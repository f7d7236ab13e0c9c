#include "ontoapi/compiler/compiler.h"

#include <algorithm>
#include <cctype>
#include <deque>

#include "ontoapi/rdf/vocab.h"

namespace ontoapi::compiler {

using ontology::ClassInfo;
using ontology::OntologyModel;
using ontology::PropertyKind;

namespace {

constexpr std::string_view kLabelDescription =
    "Human readable description of the resource";
constexpr std::string_view kTypeDescription = "type of the resource";

bool isVowel(char c) { return std::string_view("aeiou").find(c) != std::string_view::npos; }

PropertySchema stringArray(std::string name, std::string_view description) {
  return PropertySchema{.name = std::move(name),
                        .shape = ValueShape::ArrayOfScalar,
                        .scalarType = ScalarType::String,
                        .nullable = true,
                        .description = std::string(description)};
}

}  // namespace

// ____________________________________________________________________________
std::string pluralize(std::string_view name) {
  std::string out(name);
  auto n = out.size();
  if (n >= 2 && out[n - 1] == 'y' && !isVowel(out[n - 2])) {
    out.replace(n - 1, 1, "ies");
  } else if (out.ends_with("s") || out.ends_with("x") || out.ends_with("z") ||
             out.ends_with("ch") || out.ends_with("sh")) {
    out += "es";
  } else {
    out += "s";
  }
  return out;
}

// ____________________________________________________________________________
std::string pathName(const ClassInfo& cls) {
  std::string lower = cls.localName;
  std::ranges::transform(lower, lower.begin(),
                         [](unsigned char c) { return std::tolower(c); });
  return pluralize(lower);
}

// ____________________________________________________________________________
ScalarMapping datatypeToScalar(std::string_view iri) {
  if (iri == vocab::kXsdInteger || iri == vocab::kXsdInt ||
      iri == vocab::kXsdLong) {
    return {ScalarType::Integer, std::nullopt};
  }
  if (iri == vocab::kXsdFloat || iri == vocab::kXsdDouble ||
      iri == vocab::kXsdDecimal) {
    return {ScalarType::Number, std::nullopt};
  }
  if (iri == vocab::kXsdBoolean) return {ScalarType::Boolean, std::nullopt};
  if (iri == vocab::kXsdDateTime) return {ScalarType::String, "date-time"};
  if (iri == vocab::kXsdAnyUri) return {ScalarType::String, "uri"};
  return {ScalarType::String, std::nullopt};
}

// ____________________________________________________________________________
SchemaObject classToSchema(const OntologyModel& model,
                           const std::string& classIri, bool includeUndomained,
                           Warnings* warnings) {
  const ClassInfo& cls = model.classInfo(classIri);
  SchemaObject schema;
  schema.name = cls.localName;
  schema.description = cls.comment;
  schema.properties["id"] = PropertySchema{.name = "id",
                                           .shape = ValueShape::Scalar,
                                           .scalarType = ScalarType::String,
                                           .nullable = false};
  schema.properties["label"] = stringArray("label", kLabelDescription);
  schema.properties["type"] = stringArray("type", kTypeDescription);

  for (const auto* prop :
       ontology::effectiveProperties(model, classIri, includeUndomained)) {
    if (schema.properties.contains(prop->localName)) {
      warn(warnings, "property <" + prop->iri + "> clashes with reserved field '" +
                         prop->localName + "' in " + cls.localName + "; skipped");
      continue;
    }
    PropertySchema field{.name = prop->localName,
                         .nullable = true,
                         .description = prop->comment};
    if (prop->kind == PropertyKind::Object) {
      if (prop->ranges.empty()) {
        warn(warnings, "object property <" + prop->iri +
                           "> has no named class range; excluded from " +
                           cls.localName);
        continue;
      }
      if (prop->ranges.size() > 1) {
        warn(warnings, "object property <" + prop->iri +
                           "> has several ranges; using <" +
                           *prop->ranges.begin() + ">");
      }
      field.shape = ValueShape::ArrayOfRef;
      field.refTarget = model.classInfo(*prop->ranges.begin()).localName;
    } else {
      if (prop->ranges.size() > 1) {
        warn(warnings, "datatype property <" + prop->iri +
                           "> has several ranges; using <" +
                           *prop->ranges.begin() + ">");
      }
      auto mapping = prop->ranges.empty()
                         ? ScalarMapping{}
                         : datatypeToScalar(*prop->ranges.begin());
      field.shape = ValueShape::ArrayOfScalar;
      field.scalarType = mapping.type;
      field.scalarFormat = mapping.format;
    }
    schema.properties.emplace(field.name, std::move(field));
  }
  return schema;
}

// ____________________________________________________________________________
std::set<std::string> resolveFilter(const OntologyModel& model,
                                    const std::vector<std::string>& entries) {
  std::set<std::string> result;
  std::vector<std::string> unknown;
  for (const auto& entry : entries) {
    if (model.hasClass(entry)) {
      result.insert(entry);
    } else if (const auto* cls = model.findClassByLocalName(entry)) {
      result.insert(cls->iri);
    } else {
      unknown.push_back(entry);
    }
  }
  if (!unknown.empty()) {
    std::string message = "unknown classes in filter:";
    for (const auto& u : unknown) message += " " + u;
    throw NotFoundError(message);
  }
  return result;
}

// ____________________________________________________________________________
std::set<std::string> selectClasses(const OntologyModel& model,
                                    const std::optional<std::set<std::string>>& filter,
                                    bool includeUndomained) {
  std::set<std::string> selected;
  if (!filter) {
    for (const auto& [iri, info] : model.classes) selected.insert(iri);
    return selected;
  }
  std::vector<std::string> unknown;
  for (const auto& iri : *filter) {
    if (!model.hasClass(iri)) unknown.push_back(iri);
  }
  if (!unknown.empty()) {
    std::string message = "unknown classes in filter:";
    for (const auto& u : unknown) message += " <" + u + ">";
    throw NotFoundError(message);
  }
  std::deque<std::string> queue(filter->begin(), filter->end());
  selected.insert(filter->begin(), filter->end());
  auto enqueue = [&](const std::string& iri) {
    if (model.hasClass(iri) && selected.insert(iri).second) queue.push_back(iri);
  };
  while (!queue.empty()) {
    auto current = std::move(queue.front());
    queue.pop_front();
    for (const auto& super : model.classInfo(current).directSuperclasses) {
      enqueue(super);
    }
    for (const auto* prop :
         ontology::effectiveProperties(model, current, includeUndomained)) {
      if (prop->kind != PropertyKind::Object) continue;
      for (const auto& range : prop->ranges) enqueue(range);
    }
  }
  return selected;
}

// ____________________________________________________________________________
std::pair<PathItem, PathItem> buildPaths(const ClassInfo& cls) {
  const std::string segment = pathName(cls);
  const std::string& name = cls.localName;
  const std::string ref = name;

  PathItem collection{.route = "/" + segment};
  OperationSpec list{
      .operationId = segment + "_get",
      .summary = "List all instances of " + name,
      .description = cls.comment,
      .parameters =
          {Parameter{.name = "label",
                     .in = "query",
                     .required = false,
                     .type = ScalarType::String,
                     .description = "Filter by label"},
           Parameter{.name = "page",
                     .in = "query",
                     .required = false,
                     .type = ScalarType::Integer,
                     .description = "Page number",
                     .defaultValue = 1,
                     .minimum = 1},
           Parameter{.name = "per_page",
                     .in = "query",
                     .required = false,
                     .type = ScalarType::Integer,
                     .description = "Items per page",
                     .defaultValue = kDefaultPerPage,
                     .minimum = 1,
                     .maximum = kMaxPerPage}},
      .responses = {{"200", {"Successful response - returns an array of " + name +
                                 " entities",
                             ref, true}},
                    {"400", {"Invalid query parameters", std::nullopt, false}}}};
  OperationSpec create{
      .operationId = segment + "_post",
      .summary = "Create a " + name,
      .description = cls.comment,
      .requestSchema = ref,
      .responses = {{"201", {"Created " + name, ref, false}},
                    {"400", {"Invalid resource", std::nullopt, false}},
                    {"401", {"Unauthorized", std::nullopt, false}}}};
  collection.operations["get"] = std::move(list);
  collection.operations["post"] = std::move(create);

  Parameter idParam{.name = "id",
                    .in = "path",
                    .required = true,
                    .type = ScalarType::String,
                    .description = "The ID of the " + name + " to be retrieved"};
  PathItem item{.route = "/" + segment + "/{id}"};
  item.operations["get"] = OperationSpec{
      .operationId = segment + "_id_get",
      .summary = "Get a single " + name + " by its id",
      .description = cls.comment,
      .parameters = {idParam},
      .responses = {{"200", {"Gets the " + name, ref, false}},
                    {"404", {"Not found", std::nullopt, false}}}};
  item.operations["put"] = OperationSpec{
      .operationId = segment + "_id_put",
      .summary = "Update an existing " + name,
      .description = cls.comment,
      .parameters = {idParam},
      .requestSchema = ref,
      .responses = {{"200", {"Updated " + name, ref, false}},
                    {"400", {"Invalid resource", std::nullopt, false}},
                    {"401", {"Unauthorized", std::nullopt, false}},
                    {"404", {"Not found", std::nullopt, false}}}};
  item.operations["delete"] = OperationSpec{
      .operationId = segment + "_id_delete",
      .summary = "Delete an existing " + name,
      .description = cls.comment,
      .parameters = {idParam},
      .responses = {{"204", {"Deleted " + name, std::nullopt, false}},
                    {"401", {"Unauthorized", std::nullopt, false}},
                    {"404", {"Not found", std::nullopt, false}}}};
  return {std::move(collection), std::move(item)};
}

// ____________________________________________________________________________
ApiSpecDocument compileSpec(const OntologyModel& model,
                            const CompileConfig& config, Warnings* warnings) {
  ApiSpecDocument doc;
  doc.title = config.title;
  doc.version = config.version;
  std::map<std::string, std::string> routeOwner;
  for (const auto& iri :
       selectClasses(model, config.filter, config.includeUndomained)) {
    const auto& cls = model.classInfo(iri);
    auto [collection, item] = buildPaths(cls);
    auto [it, inserted] = routeOwner.emplace(collection.route, iri);
    if (!inserted) {
      throw CompileError("route " + collection.route + " is produced by both <" +
                         it->second + "> and <" + iri + ">");
    }
    doc.schemas.emplace(cls.localName,
                        classToSchema(model, iri, config.includeUndomained,
                                      warnings));
    doc.paths.emplace(collection.route, std::move(collection));
    doc.paths.emplace(item.route, std::move(item));
  }
  return doc;
}

}  // namespace ontoapi::compiler
