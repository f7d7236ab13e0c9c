#include "ontoapi/compiler/api_spec.h"

#include <yaml-cpp/yaml.h>

#include <regex>
#include <stdexcept>

namespace ontoapi::compiler {

using nlohmann::json;

namespace {

constexpr std::string_view kJsonMedia = "application/json";

json refTo(const std::string& schemaName) {
  return json{{"$ref", std::string(kSchemaRefPrefix) + schemaName}};
}

std::string refTarget(const json& ref) {
  auto value = ref.at("$ref").get<std::string>();
  if (!value.starts_with(kSchemaRefPrefix)) {
    throw std::runtime_error("unsupported $ref " + value);
  }
  return value.substr(kSchemaRefPrefix.size());
}

ScalarType scalarFromString(const std::string& name) {
  if (name == "string") return ScalarType::String;
  if (name == "integer") return ScalarType::Integer;
  if (name == "number") return ScalarType::Number;
  if (name == "boolean") return ScalarType::Boolean;
  throw std::runtime_error("unsupported scalar type " + name);
}

json toJson(const PropertySchema& field) {
  json out;
  if (field.description) out["description"] = *field.description;
  out["nullable"] = field.nullable;
  auto scalar = [&](json& target) {
    target["type"] = std::string(toString(field.scalarType.value_or(ScalarType::String)));
    if (field.scalarFormat) target["format"] = *field.scalarFormat;
  };
  switch (field.shape) {
    case ValueShape::ArrayOfRef:
      out["type"] = "array";
      out["items"] = refTo(field.refTarget.value());
      break;
    case ValueShape::ArrayOfScalar:
      out["type"] = "array";
      out["items"] = json::object();
      scalar(out["items"]);
      break;
    case ValueShape::Scalar:
      scalar(out);
      break;
  }
  return out;
}

PropertySchema propertyFromJson(const std::string& name, const json& in) {
  PropertySchema field;
  field.name = name;
  field.nullable = in.value("nullable", false);
  if (in.contains("description")) field.description = in["description"].get<std::string>();
  auto type = in.value("type", std::string("string"));
  if (type == "array") {
    const auto& items = in.at("items");
    if (items.contains("$ref")) {
      field.shape = ValueShape::ArrayOfRef;
      field.refTarget = refTarget(items);
    } else {
      field.shape = ValueShape::ArrayOfScalar;
      field.scalarType = scalarFromString(items.value("type", std::string("string")));
      if (items.contains("format")) field.scalarFormat = items["format"].get<std::string>();
    }
  } else {
    field.shape = ValueShape::Scalar;
    field.scalarType = scalarFromString(type);
    if (in.contains("format")) field.scalarFormat = in["format"].get<std::string>();
  }
  return field;
}

json toJson(const Parameter& p) {
  json schema{{"type", std::string(toString(p.type))}};
  if (p.defaultValue) schema["default"] = *p.defaultValue;
  if (p.minimum) schema["minimum"] = *p.minimum;
  if (p.maximum) schema["maximum"] = *p.maximum;
  json out{{"name", p.name}, {"in", p.in}, {"required", p.required},
           {"schema", schema}};
  if (p.description) out["description"] = *p.description;
  return out;
}

Parameter parameterFromJson(const json& in) {
  Parameter p;
  p.name = in.at("name").get<std::string>();
  p.in = in.at("in").get<std::string>();
  p.required = in.value("required", false);
  if (in.contains("description")) p.description = in["description"].get<std::string>();
  const auto& schema = in.at("schema");
  p.type = scalarFromString(schema.value("type", std::string("string")));
  if (schema.contains("default")) p.defaultValue = schema["default"].get<long long>();
  if (schema.contains("minimum")) p.minimum = schema["minimum"].get<long long>();
  if (schema.contains("maximum")) p.maximum = schema["maximum"].get<long long>();
  return p;
}

json toJson(const OperationSpec& op) {
  json out{{"operationId", op.operationId}, {"summary", op.summary}};
  if (op.description) out["description"] = *op.description;
  if (!op.parameters.empty()) {
    for (const auto& p : op.parameters) out["parameters"].push_back(toJson(p));
  }
  if (op.requestSchema) {
    out["requestBody"] = {
        {"required", true},
        {"content", {{std::string(kJsonMedia), {{"schema", refTo(*op.requestSchema)}}}}}};
  }
  json responses = json::object();
  for (const auto& [code, response] : op.responses) {
    json r{{"description", response.description}};
    if (response.schemaRef) {
      json schema = response.isArray
                        ? json{{"type", "array"}, {"items", refTo(*response.schemaRef)}}
                        : refTo(*response.schemaRef);
      r["content"] = {{std::string(kJsonMedia), {{"schema", schema}}}};
    }
    responses[code] = std::move(r);
  }
  out["responses"] = std::move(responses);
  return out;
}

OperationSpec operationFromJson(const json& in) {
  OperationSpec op;
  op.operationId = in.value("operationId", std::string());
  op.summary = in.value("summary", std::string());
  if (in.contains("description")) op.description = in["description"].get<std::string>();
  if (in.contains("parameters")) {
    for (const auto& p : in["parameters"]) op.parameters.push_back(parameterFromJson(p));
  }
  if (in.contains("requestBody")) {
    op.requestSchema = refTarget(
        in["requestBody"].at("content").at(std::string(kJsonMedia)).at("schema"));
  }
  for (const auto& [code, r] : in.at("responses").items()) {
    ResponseSpec response;
    response.description = r.value("description", std::string());
    if (r.contains("content")) {
      const auto& schema = r["content"].at(std::string(kJsonMedia)).at("schema");
      if (schema.value("type", std::string()) == "array") {
        response.isArray = true;
        response.schemaRef = refTarget(schema.at("items"));
      } else {
        response.schemaRef = refTarget(schema);
      }
    }
    op.responses.emplace(code, std::move(response));
  }
  return op;
}

// Plain scalars YAML would resolve to something other than a string.
bool needsQuoting(const std::string& text) {
  if (text.empty()) return true;
  static const std::regex kSpecial(
      R"(^(~|null|Null|NULL|true|True|TRUE|false|False|FALSE|y|Y|yes|Yes|YES|n|N|no|No|NO|on|On|ON|off|Off|OFF)$)");
  static const std::regex kNumeric(
      R"(^[-+]?(\.[0-9]+|[0-9][0-9_]*(\.[0-9]*)?)([eE][-+]?[0-9]+)?$|^0x[0-9a-fA-F]+$|^0o[0-7]+$|^[-+]?\.(inf|Inf|INF)$|^\.(nan|NaN|NAN)$|^[0-9]+(:[0-5]?[0-9])+$)");
  return std::regex_match(text, kSpecial) || std::regex_match(text, kNumeric) ||
         text.front() == ' ' || text.back() == ' ';
}

void emitString(YAML::Emitter& out, const std::string& text) {
  if (needsQuoting(text)) {
    out << YAML::DoubleQuoted << text;
  } else {
    out << text;
  }
}

void emit(YAML::Emitter& out, const json& value) {
  switch (value.type()) {
    case json::value_t::object:
      if (value.empty()) {
        out << YAML::Flow << YAML::BeginMap << YAML::EndMap;
        return;
      }
      out << YAML::BeginMap;
      for (const auto& [key, item] : value.items()) {
        out << YAML::Key;
        emitString(out, key);
        out << YAML::Value;
        emit(out, item);
      }
      out << YAML::EndMap;
      return;
    case json::value_t::array:
      if (value.empty()) {
        out << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
        return;
      }
      out << YAML::BeginSeq;
      for (const auto& item : value) emit(out, item);
      out << YAML::EndSeq;
      return;
    case json::value_t::string:
      emitString(out, value.get<std::string>());
      return;
    case json::value_t::boolean:
      out << (value.get<bool>() ? "true" : "false");
      return;
    case json::value_t::number_integer:
      out << value.get<long long>();
      return;
    case json::value_t::number_unsigned:
      out << value.get<unsigned long long>();
      return;
    case json::value_t::number_float:
      out << value.get<double>();
      return;
    default:
      out << YAML::Null;
  }
}

json fromYamlNode(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Map: {
      json out = json::object();
      for (const auto& entry : node) {
        out[entry.first.as<std::string>()] = fromYamlNode(entry.second);
      }
      return out;
    }
    case YAML::NodeType::Sequence: {
      json out = json::array();
      for (const auto& item : node) out.push_back(fromYamlNode(item));
      return out;
    }
    case YAML::NodeType::Scalar: {
      const auto& text = node.Scalar();
      if (node.Tag() == "!") return text;
      if (text == "~" || text == "null" || text == "Null" || text == "NULL") {
        return nullptr;
      }
      if (text == "true" || text == "True" || text == "TRUE") return true;
      if (text == "false" || text == "False" || text == "FALSE") return false;
      static const std::regex kInteger(R"(^[-+]?[0-9]+$)");
      static const std::regex kFloat(
          R"(^[-+]?(\.[0-9]+|[0-9]+(\.[0-9]*)?)([eE][-+]?[0-9]+)?$)");
      if (std::regex_match(text, kInteger)) {
        try {
          return std::stoll(text);
        } catch (const std::out_of_range&) {
          return text;
        }
      }
      if (std::regex_match(text, kFloat)) return std::stod(text);
      return text;
    }
    default:
      return nullptr;
  }
}

}  // namespace

// ____________________________________________________________________________
std::string_view toString(ScalarType type) {
  switch (type) {
    case ScalarType::String:
      return "string";
    case ScalarType::Integer:
      return "integer";
    case ScalarType::Number:
      return "number";
    case ScalarType::Boolean:
      return "boolean";
  }
  return "string";
}

// ____________________________________________________________________________
json toJson(const SchemaObject& schema) {
  json out{{"type", "object"}};
  if (schema.description) out["description"] = *schema.description;
  json properties = json::object();
  for (const auto& [name, field] : schema.properties) {
    properties[name] = toJson(field);
  }
  out["properties"] = std::move(properties);
  return out;
}

// ____________________________________________________________________________
json toJson(const ApiSpecDocument& doc) {
  json out;
  out["openapi"] = std::string(kOpenApiVersion);
  out["info"] = {{"title", doc.title}, {"version", doc.version}};
  if (doc.description) out["info"]["description"] = *doc.description;
  json paths = json::object();
  for (const auto& [route, item] : doc.paths) {
    json ops = json::object();
    for (const auto& [verb, op] : item.operations) ops[verb] = toJson(op);
    paths[route] = std::move(ops);
  }
  out["paths"] = std::move(paths);
  json schemas = json::object();
  for (const auto& [name, schema] : doc.schemas) schemas[name] = toJson(schema);
  out["components"] = {{"schemas", std::move(schemas)}};
  return out;
}

// ____________________________________________________________________________
ApiSpecDocument fromJson(const json& in) {
  ApiSpecDocument doc;
  const auto& info = in.at("info");
  doc.title = info.at("title").get<std::string>();
  doc.version = info.at("version").is_string() ? info.at("version").get<std::string>()
                                               : info.at("version").dump();
  if (info.contains("description")) doc.description = info["description"].get<std::string>();
  for (const auto& [route, ops] : in.at("paths").items()) {
    PathItem item{.route = route};
    for (const auto& [verb, op] : ops.items()) {
      item.operations.emplace(verb, operationFromJson(op));
    }
    doc.paths.emplace(route, std::move(item));
  }
  if (in.contains("components") && in["components"].contains("schemas")) {
    for (const auto& [name, s] : in["components"]["schemas"].items()) {
      SchemaObject schema{.name = name};
      if (s.contains("description")) schema.description = s["description"].get<std::string>();
      if (s.contains("properties")) {
        for (const auto& [field, def] : s["properties"].items()) {
          schema.properties.emplace(field, propertyFromJson(field, def));
        }
      }
      doc.schemas.emplace(name, std::move(schema));
    }
  }
  return doc;
}

// ____________________________________________________________________________
std::string toYaml(const json& value) {
  YAML::Emitter out;
  out.SetIndent(2);
  emit(out, value);
  std::string text = out.c_str();
  text += '\n';
  return text;
}

// ____________________________________________________________________________
json yamlToJson(const std::string& yaml) { return fromYamlNode(YAML::Load(yaml)); }

// ____________________________________________________________________________
std::string serializeSpec(const ApiSpecDocument& document) {
  return toYaml(toJson(document));
}

// ____________________________________________________________________________
ApiSpecDocument parseSpec(const std::string& yaml) {
  return fromJson(yamlToJson(yaml));
}

}  // namespace ontoapi::compiler
