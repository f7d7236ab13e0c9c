#include "ontoapi/templates/query_template.h"

#include <cctype>
#include <regex>
#include <set>
#include <sstream>

#include "ontoapi/rdf/vocab.h"

namespace ontoapi::templates {

namespace {

constexpr std::string_view kRdfsPrefix =
    "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n";

// Depth-1 description of ?subject: its outgoing triples plus type and
// label of every object.
std::string getByIdBody() {
  return std::string(kRdfsPrefix) +
         "CONSTRUCT {\n"
         "    ?_resource_iri ?predicate ?prop .\n"
         "    ?prop a ?type .\n"
         "    ?prop rdfs:label ?label\n"
         "}\n"
         "WHERE {\n"
         "    ?_resource_iri ?predicate ?prop\n"
         "    OPTIONAL {\n"
         "        ?prop  a ?type\n"
         "        OPTIONAL {\n"
         "            ?prop rdfs:label ?label\n"
         "        }\n"
         "    }\n"
         "}\n";
}

std::string getAllBody(const std::string& classIri) {
  return std::string(kRdfsPrefix) +
         "PREFIX hydra: <http://www.w3.org/ns/hydra/core#>\n"
         "CONSTRUCT {\n"
         "    _:page hydra:member ?item .\n"
         "    ?item ?predicate ?prop .\n"
         "    ?prop a ?type .\n"
         "    ?prop rdfs:label ?label\n"
         "}\n"
         "WHERE {\n"
         "    {\n"
         "        SELECT DISTINCT ?item WHERE {\n"
         "            ?item a <" + classIri + "> .\n"
         "            OPTIONAL { ?item rdfs:label ?itemLabel }\n"
         "            FILTER(?__label = \"\" || "
         "CONTAINS(LCASE(STR(?itemLabel)), LCASE(?__label)))\n"
         "        }\n"
         "        ORDER BY ASC(STR(?item))\n"
         "        LIMIT ?_per_page_int\n"
         "        OFFSET ?_offset_int\n"
         "    }\n"
         "    ?item ?predicate ?prop\n"
         "    OPTIONAL {\n"
         "        ?prop a ?type\n"
         "        OPTIONAL {\n"
         "            ?prop rdfs:label ?label\n"
         "        }\n"
         "    }\n"
         "}\n";
}

constexpr std::string_view kInsertBody =
    "INSERT DATA {\n"
    "    GRAPH ?_g_iri {\n"
    "        ?_resource_triples\n"
    "    }\n"
    "}\n";

constexpr std::string_view kUpdateBody =
    "DELETE WHERE {\n"
    "    GRAPH ?_g_iri {\n"
    "        ?_resource_iri ?predicate ?object\n"
    "    }\n"
    "} ;\n"
    "INSERT DATA {\n"
    "    GRAPH ?_g_iri {\n"
    "        ?_resource_triples\n"
    "    }\n"
    "}\n";

constexpr std::string_view kDeleteBody =
    "DELETE WHERE {\n"
    "    GRAPH ?_g_iri {\n"
    "        ?_resource_iri ?predicate ?object\n"
    "    }\n"
    "}\n";

bool isNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

struct Token {
  std::size_t begin;
  std::size_t end;
  PlaceholderSpec spec;
};

// Finds `?_name` / `$_name` tokens outside strings, IRIs and comments.
std::vector<Token> findPlaceholders(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == '#') {
      while (i < n && text[i] != '\n') ++i;
    } else if (c == '"' || c == '\'') {
      bool isLong = text.compare(i, 3, std::string(3, c)) == 0;
      i += isLong ? 3 : 1;
      while (i < n) {
        if (text[i] == '\\') {
          i += 2;
        } else if (isLong && text.compare(i, 3, std::string(3, c)) == 0) {
          i += 3;
          break;
        } else if (!isLong && (text[i] == c || text[i] == '\n')) {
          ++i;
          break;
        } else {
          ++i;
        }
      }
    } else if (c == '<') {
      auto close = text.find_first_of("> \t\r\n", i + 1);
      i = (close != std::string::npos && text[close] == '>') ? close + 1 : i + 1;
    } else if ((c == '?' || c == '$') && i + 1 < n && text[i + 1] == '_' &&
               (i == 0 || !isNameChar(text[i - 1]))) {
      std::size_t start = i;
      bool optional = i + 2 < n && text[i + 2] == '_';
      std::size_t nameBegin = i + (optional ? 3 : 2);
      std::size_t j = nameBegin;
      while (j < n && isNameChar(text[j])) ++j;
      if (j > nameBegin) {
        std::string name = text.substr(nameBegin, j - nameBegin);
        out.push_back({start, j,
                       PlaceholderSpec{name, placeholderTypeFor(name), !optional}});
      }
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

std::string typeName(PlaceholderType type) {
  switch (type) {
    case PlaceholderType::Iri:
      return "iri";
    case PlaceholderType::Integer:
      return "integer";
    case PlaceholderType::Triples:
      return "triples";
    case PlaceholderType::Literal:
      return "literal";
  }
  return "literal";
}

PlaceholderType typeOf(const BindingValue& value) {
  switch (value.index()) {
    case 0:
      return PlaceholderType::Iri;
    case 1:
      return PlaceholderType::Literal;
    case 2:
      return PlaceholderType::Integer;
    default:
      return PlaceholderType::Triples;
  }
}

bool hasScheme(std::string_view iri) {
  static const std::regex kScheme("^[A-Za-z][A-Za-z0-9+.-]*:.*");
  return std::regex_match(iri.begin(), iri.end(), kScheme);
}

std::string renderIri(const std::string& name, const std::string& iri) {
  if (!hasScheme(iri) || !rdf::isSafeIri(iri)) {
    throw TemplateError("value for '" + name + "' is not an acceptable IRI");
  }
  return "<" + iri + ">";
}

std::string renderTerm(const std::string& name, const rdf::Term& term) {
  if (term.isIri()) return renderIri(name, term.value);
  if (term.isBlank()) {
    if (term.value.empty() ||
        !std::ranges::all_of(term.value, [](char c) { return isNameChar(c); })) {
      throw TemplateError("blank node label in '" + name + "' is not acceptable");
    }
    return "_:" + term.value;
  }
  static const std::regex kLang("^[a-zA-Z]+(-[a-zA-Z0-9]+)*$");
  std::string out = "\"" + rdf::escapeString(term.value) + "\"";
  if (!term.language.empty()) {
    if (!std::regex_match(term.language, kLang)) {
      throw TemplateError("language tag in '" + name + "' is not acceptable");
    }
    out += "@" + term.language;
  } else if (!term.datatype.empty()) {
    out += "^^" + renderIri(name, term.datatype);
  }
  return out;
}

std::string render(const PlaceholderSpec& spec, const BindingValue& value) {
  switch (spec.type) {
    case PlaceholderType::Iri:
      return renderIri(spec.name, std::get<IriValue>(value).iri);
    case PlaceholderType::Literal:
      return "\"" + rdf::escapeString(std::get<std::string>(value)) + "\"";
    case PlaceholderType::Integer:
      return std::to_string(std::get<long long>(value));
    case PlaceholderType::Triples: {
      std::string out;
      for (const auto& t : std::get<std::vector<rdf::Triple>>(value)) {
        if (t.subject.isLiteral() || !t.predicate.isIri()) {
          throw TemplateError("malformed triple in '" + spec.name + "'");
        }
        out += renderTerm(spec.name, t.subject) + " " +
               renderTerm(spec.name, t.predicate) + " " +
               renderTerm(spec.name, t.object) + " .\n";
      }
      return out;
    }
  }
  return {};
}

std::string renderUnbound(const PlaceholderSpec& spec) {
  switch (spec.type) {
    case PlaceholderType::Literal:
      return "\"\"";
    case PlaceholderType::Integer:
      return "0";
    case PlaceholderType::Iri:
      return "?unbound_" + spec.name;
    case PlaceholderType::Triples:
      return "";
  }
  return {};
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

// ____________________________________________________________________________
std::string_view toString(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::GetAll:
      return "get_all";
    case TemplateKind::GetById:
      return "get_by_id";
    case TemplateKind::Insert:
      return "insert";
    case TemplateKind::Update:
      return "update";
    case TemplateKind::Delete:
      return "delete";
    case TemplateKind::Custom:
      return "custom";
  }
  return "custom";
}

// ____________________________________________________________________________
std::optional<TemplateKind> kindFromString(std::string_view name) {
  for (auto kind : kDefaultKinds) {
    if (toString(kind) == name) return kind;
  }
  if (name == "custom") return TemplateKind::Custom;
  return std::nullopt;
}

// ____________________________________________________________________________
PlaceholderType placeholderTypeFor(std::string_view name) {
  if (name.ends_with("_iri") || name == "iri") return PlaceholderType::Iri;
  if (name.ends_with("_int") || name == "int") return PlaceholderType::Integer;
  if (name.ends_with("_triples") || name == "triples") {
    return PlaceholderType::Triples;
  }
  return PlaceholderType::Literal;
}

// ____________________________________________________________________________
std::string parameterName(const PlaceholderSpec& spec) {
  std::string_view suffix;
  switch (spec.type) {
    case PlaceholderType::Iri:
      suffix = "_iri";
      break;
    case PlaceholderType::Integer:
      suffix = "_int";
      break;
    case PlaceholderType::Triples:
      suffix = "_triples";
      break;
    case PlaceholderType::Literal:
      return spec.name;
  }
  if (spec.name.size() > suffix.size() && spec.name.ends_with(suffix)) {
    return spec.name.substr(0, spec.name.size() - suffix.size());
  }
  return spec.name;
}

// ____________________________________________________________________________
std::vector<PlaceholderSpec> scanPlaceholders(const std::string& body) {
  std::vector<PlaceholderSpec> specs;
  for (const auto& token : findPlaceholders(body)) {
    auto it = std::ranges::find(specs, token.spec.name, &PlaceholderSpec::name);
    if (it == specs.end()) {
      specs.push_back(token.spec);
    } else {
      it->required = it->required || token.spec.required;
    }
  }
  return specs;
}

// ____________________________________________________________________________
Decorated parseDecorators(const std::string& text) {
  static const std::regex kDecorator(R"(^#\+\s*([A-Za-z_][A-Za-z0-9_-]*)\s*:(.*)$)");
  Decorated out;
  std::size_t pos = 0;
  std::size_t lineNo = 0;
  while (pos < text.size() && text.compare(pos, 2, "#+") == 0) {
    ++lineNo;
    auto eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string::npos ? std::string::npos
                                                           : eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (!std::regex_match(line, m, kDecorator)) {
      throw DecoratorError(lineNo, "malformed decorator '" + line + "'");
    }
    auto key = m[1].str();
    auto value = trim(m[2].str());
    if (out.metadata.contains(key)) {
      throw DecoratorError(lineNo, "duplicate decorator '" + key + "'");
    }
    if (key == "summary") out.summary = value;
    out.metadata.emplace(key, value);
    pos = eol == std::string::npos ? text.size() : eol + 1;
  }
  out.body = text.substr(pos);
  out.placeholders = scanPlaceholders(out.body);
  return out;
}

// ____________________________________________________________________________
QueryTemplate makeTemplate(std::string name, TemplateKind kind,
                           const std::string& fileText) {
  auto decorated = parseDecorators(fileText);
  return QueryTemplate{.name = std::move(name),
                       .kind = kind,
                       .text = std::move(decorated.body),
                       .placeholders = std::move(decorated.placeholders),
                       .summary = std::move(decorated.summary),
                       .metadata = std::move(decorated.metadata)};
}

// ____________________________________________________________________________
std::vector<QueryTemplate> generateDefaultTemplates(const ontology::ClassInfo& cls) {
  std::vector<QueryTemplate> out;
  auto add = [&](TemplateKind kind, std::string summary, std::string body) {
    std::string text = "#+ summary: " + summary + "\n" + body;
    out.push_back(makeTemplate(std::string(toString(kind)), kind, text));
  };
  add(TemplateKind::GetAll,
      "Return all instances of " + cls.localName + ", optionally filtered by label",
      getAllBody(cls.iri));
  add(TemplateKind::GetById, "Return resource information by its resource_iri",
      getByIdBody());
  add(TemplateKind::Insert, "Insert a new " + cls.localName + " into a graph",
      std::string(kInsertBody));
  add(TemplateKind::Update,
      "Replace the outgoing triples of a " + cls.localName + " in a graph",
      std::string(kUpdateBody));
  add(TemplateKind::Delete,
      "Delete the outgoing triples of a " + cls.localName + " in a graph",
      std::string(kDeleteBody));
  return out;
}

// ____________________________________________________________________________
std::string instantiate(const QueryTemplate& tmpl,
                        const std::vector<PlaceholderBinding>& bindings) {
  std::map<std::string, const BindingValue*> bound;
  for (const auto& b : bindings) {
    auto spec = std::ranges::find(tmpl.placeholders, b.name, &PlaceholderSpec::name);
    if (spec == tmpl.placeholders.end()) {
      throw TemplateError("unknown placeholder '" + b.name + "'");
    }
    if (typeOf(b.value) != spec->type) {
      throw TemplateError("placeholder '" + b.name + "' expects " +
                          typeName(spec->type) + ", got " + typeName(typeOf(b.value)));
    }
    bound[b.name] = &b.value;
  }
  std::map<std::string, std::string> rendered;
  for (const auto& spec : tmpl.placeholders) {
    auto it = bound.find(spec.name);
    if (it != bound.end()) {
      rendered[spec.name] = render(spec, *it->second);
    } else if (spec.required) {
      throw TemplateError("missing binding for '" + spec.name + "'");
    } else {
      rendered[spec.name] = renderUnbound(spec);
    }
  }
  std::string out;
  std::size_t last = 0;
  for (const auto& token : findPlaceholders(tmpl.text)) {
    out.append(tmpl.text, last, token.begin - last);
    out += rendered.at(token.spec.name);
    last = token.end;
  }
  out.append(tmpl.text, last);
  return out;
}

// ____________________________________________________________________________
std::string renderRq(const QueryTemplate& tmpl) {
  std::string out;
  if (tmpl.summary) out += "#+ summary: " + *tmpl.summary + "\n";
  for (const auto& [key, value] : tmpl.metadata) {
    if (key != "summary") out += "#+ " + key + ": " + value + "\n";
  }
  return out + tmpl.text;
}

// ____________________________________________________________________________
bool isConstructQuery(const std::string& body) {
  std::string stripped;
  std::istringstream in(body);
  for (std::string line; std::getline(in, line);) {
    auto hash = line.find('#');
    // Comments only matter before the first keyword; IRIs in the prologue
    // may contain '#', so only strip when it starts the line.
    if (hash != std::string::npos && trim(line.substr(0, hash)).empty()) continue;
    stripped += line + "\n";
  }
  static const std::regex kConstruct(
      R"(^\s*((PREFIX\s+[^\s:]*:\s*<[^>]*>|BASE\s+<[^>]*>)\s*)*CONSTRUCT\b[\s\S]*)",
      std::regex::icase);
  return std::regex_match(stripped, kConstruct);
}

// ____________________________________________________________________________
CustomEndpoint registerCustomQuery(const std::string& route,
                                   const std::string& rootClass,
                                   QueryTemplate query,
                                   const std::set<std::string>& existingRoutes) {
  if (!isConstructQuery(query.text)) {
    throw TemplateError("custom query for " + route + " is not a CONSTRUCT query");
  }
  if (existingRoutes.contains(route)) {
    throw TemplateError("custom query route " + route +
                        " collides with an existing route");
  }
  for (const auto& spec : query.placeholders) {
    if (spec.type == PlaceholderType::Triples) {
      throw TemplateError("custom query for " + route +
                          " uses a triples placeholder");
    }
  }
  query.kind = TemplateKind::Custom;
  return CustomEndpoint{route, rootClass, std::move(query)};
}

// ____________________________________________________________________________
compiler::PathItem customPathItem(const CustomEndpoint& endpoint,
                                  const std::string& schemaName) {
  compiler::OperationSpec op;
  std::string id = endpoint.route.substr(1);
  std::ranges::replace_if(
      id, [](char c) { return !std::isalnum(static_cast<unsigned char>(c)); }, '_');
  op.operationId = "custom_" + id + "_get";
  op.summary = endpoint.query.summary.value_or("Custom query " + endpoint.route);
  if (auto it = endpoint.query.metadata.find("description");
      it != endpoint.query.metadata.end()) {
    op.description = it->second;
  }
  for (const auto& spec : endpoint.query.placeholders) {
    compiler::Parameter p;
    p.name = parameterName(spec);
    p.in = "query";
    p.required = spec.required;
    p.type = spec.type == PlaceholderType::Integer ? compiler::ScalarType::Integer
                                                   : compiler::ScalarType::String;
    op.parameters.push_back(std::move(p));
  }
  op.responses["200"] = {"Results of the custom query", schemaName, true};
  op.responses["400"] = {"Missing or invalid parameters", std::nullopt, false};
  compiler::PathItem item{.route = endpoint.route};
  item.operations["get"] = std::move(op);
  return item;
}

}  // namespace ontoapi::templates
