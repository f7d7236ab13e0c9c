#include "ontoapi/jsonld/bridge.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <regex>
#include <sstream>

#include "ontoapi/compiler/compiler.h"
#include "ontoapi/rdf/vocab.h"

namespace ontoapi::jsonld {

using compiler::ScalarType;
using nlohmann::json;
using ontology::OntologyModel;
using rdf::Term;
using rdf::Triple;

namespace {

constexpr const char* kIdKeyword = "@id";
constexpr const char* kTypeKeyword = "@type";
constexpr const char* kSetKeyword = "@set";

std::string fieldPath(const std::string& path, const std::string& field) {
  return path.empty() ? field : path + "." + field;
}

std::string indexPath(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

bool isEnglish(const std::string& language) {
  return language == "en" || language.starts_with("en-");
}

template <typename T>
void sortUnique(std::vector<T>& items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
}

}  // namespace

// ____________________________________________________________________________
ContextMap::ContextMap(std::map<std::string, TermDefinition> terms)
    : terms_(std::move(terms)) {
  for (const auto& [name, def] : terms_) {
    if (def.kind != TermKind::Keyword) byIri_.emplace(def.iri, name);
  }
}

// ____________________________________________________________________________
const TermDefinition* ContextMap::term(const std::string& name) const {
  auto it = terms_.find(name);
  return it == terms_.end() ? nullptr : &it->second;
}

// ____________________________________________________________________________
const std::string* ContextMap::nameForIri(const std::string& iri) const {
  auto it = byIri_.find(iri);
  return it == byIri_.end() ? nullptr : &it->second;
}

// ____________________________________________________________________________
ContextMap generateContext(const OntologyModel& model,
                           const std::set<std::string>& included,
                           bool includeUndomained, Warnings* warnings) {
  std::map<std::string, TermDefinition> terms;
  terms["id"] = {.iri = kIdKeyword, .kind = TermKind::Keyword};
  terms["type"] = {.iri = kTypeKeyword, .kind = TermKind::Keyword};
  terms["label"] = {.iri = std::string(vocab::kRdfsLabel),
                    .kind = TermKind::DatatypeProperty,
                    .setContainer = true};

  for (const auto& classIri : included) {
    for (const auto* prop :
         ontology::effectiveProperties(model, classIri, includeUndomained)) {
      if (terms.contains(prop->localName)) {
        if (terms.at(prop->localName).iri != prop->iri) {
          warn(warnings, "property <" + prop->iri + "> clashes with term '" +
                             prop->localName + "'; left out of the context");
        }
        continue;
      }
      TermDefinition def{.iri = prop->iri, .setContainer = true};
      if (prop->kind == ontology::PropertyKind::Object) {
        if (prop->ranges.empty()) continue;
        def.kind = TermKind::ObjectProperty;
      } else {
        def.kind = TermKind::DatatypeProperty;
        if (!prop->ranges.empty()) def.datatype = *prop->ranges.begin();
      }
      terms.emplace(prop->localName, std::move(def));
    }
  }
  for (const auto& classIri : included) {
    const auto& cls = model.classInfo(classIri);
    if (terms.contains(cls.localName)) {
      warn(warnings, "class <" + cls.iri + "> clashes with term '" + cls.localName +
                         "'; left out of the context");
      continue;
    }
    terms.emplace(cls.localName, TermDefinition{.iri = cls.iri, .kind = TermKind::Class});
  }
  return ContextMap(std::move(terms));
}

// ____________________________________________________________________________
json toJson(const ContextMap& context) {
  json terms = json::object();
  for (const auto& [name, def] : context.terms()) {
    if (def.kind == TermKind::Keyword) {
      terms[name] = def.iri;
      continue;
    }
    json entry = {{"@id", def.iri}};
    if (def.kind == TermKind::Class || def.kind == TermKind::ObjectProperty) {
      entry["@type"] = kIdKeyword;
    } else if (def.datatype) {
      entry["@type"] = *def.datatype;
    }
    if (def.setContainer) entry["@container"] = kSetKeyword;
    terms[name] = std::move(entry);
  }
  return {{"@context", std::move(terms)}};
}

// ____________________________________________________________________________
ContextMap contextFromJson(const json& document) {
  if (!document.is_object() || !document.contains("@context") ||
      !document["@context"].is_object()) {
    throw std::runtime_error("context document needs an @context object");
  }
  std::map<std::string, TermDefinition> terms;
  for (const auto& [name, value] : document["@context"].items()) {
    if (value.is_string()) {
      auto iri = value.get<std::string>();
      if (iri.starts_with("@")) {
        terms[name] = {.iri = iri, .kind = TermKind::Keyword};
      } else {
        terms[name] = {.iri = iri, .kind = TermKind::DatatypeProperty};
      }
      continue;
    }
    if (!value.is_object() || !value.contains("@id") || !value["@id"].is_string()) {
      throw std::runtime_error("unsupported definition for term '" + name + "'");
    }
    TermDefinition def{.iri = value["@id"].get<std::string>()};
    def.setContainer = value.value("@container", "") == kSetKeyword;
    std::string type = value.value("@type", "");
    if (type == kIdKeyword) {
      def.kind = def.setContainer ? TermKind::ObjectProperty : TermKind::Class;
    } else {
      def.kind = TermKind::DatatypeProperty;
      if (!type.empty()) def.datatype = type;
    }
    terms[name] = std::move(def);
  }
  return ContextMap(std::move(terms));
}

// ____________________________________________________________________________
void PathClassTable::add(const std::string& segment, const std::string& classIri) {
  if (bySegment_.contains(segment)) {
    throw CompileError("path segment '" + segment + "' mapped twice");
  }
  if (byClass_.contains(classIri)) {
    throw CompileError("class <" + classIri + "> mapped to two path segments");
  }
  bySegment_.emplace(segment, classIri);
  byClass_.emplace(classIri, segment);
}

// ____________________________________________________________________________
const std::string* PathClassTable::classFor(const std::string& segment) const {
  auto it = bySegment_.find(segment);
  return it == bySegment_.end() ? nullptr : &it->second;
}

// ____________________________________________________________________________
const std::string* PathClassTable::segmentFor(const std::string& classIri) const {
  auto it = byClass_.find(classIri);
  return it == byClass_.end() ? nullptr : &it->second;
}

// ____________________________________________________________________________
PathClassTable buildPathTable(const OntologyModel& model,
                              const std::set<std::string>& included) {
  PathClassTable table;
  for (const auto& iri : included) {
    table.add(compiler::pathName(model.classInfo(iri)), iri);
  }
  return table;
}

// ____________________________________________________________________________
std::string serializePathTable(const PathClassTable& table) {
  std::string out;
  for (const auto& [segment, iri] : table.entries()) out += segment + "\t" + iri + "\n";
  return out;
}

// ____________________________________________________________________________
PathClassTable parsePathTable(const std::string& text) {
  PathClassTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw CompileError("paths.map line " + std::to_string(lineNo) +
                         ": expected <segment><TAB><class IRI>");
    }
    table.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return table;
}

// ____________________________________________________________________________
bool isAbsoluteIri(const std::string& value) {
  static const std::regex scheme("^[A-Za-z][A-Za-z0-9+.-]*:");
  return std::regex_search(value, scheme);
}

// ____________________________________________________________________________
std::string encodeId(const std::string& iri, const std::string& instancePrefix) {
  if (!instancePrefix.empty() && iri.size() > instancePrefix.size() &&
      iri.starts_with(instancePrefix)) {
    std::string suffix = iri.substr(instancePrefix.size());
    if (!isAbsoluteIri(suffix)) return suffix;
  }
  return iri;
}

// ____________________________________________________________________________
std::string decodeId(const std::string& id, const std::string& instancePrefix) {
  return isAbsoluteIri(id) ? id : instancePrefix + id;
}

// ____________________________________________________________________________
void ResourceEnvelope::normalize() {
  sortUnique(label);
  sortUnique(type);
  for (auto& [name, stubs] : links) {
    for (auto& stub : stubs) stub.normalize();
    std::sort(stubs.begin(), stubs.end(), [](const auto& a, const auto& b) {
      if (a.id != b.id) return a.id < b.id;
      return toJson(a).dump() < toJson(b).dump();
    });
    stubs.erase(std::unique(stubs.begin(), stubs.end()), stubs.end());
  }
  for (auto& [name, scalars] : values) sortUnique(scalars);
  std::erase_if(links, [](const auto& kv) { return kv.second.empty(); });
  std::erase_if(values, [](const auto& kv) { return kv.second.empty(); });
}

// ____________________________________________________________________________
json toJson(const ResourceEnvelope& envelope) {
  json out = json::object();
  if (envelope.id) out["id"] = *envelope.id;
  if (!envelope.label.empty()) out["label"] = envelope.label;
  if (!envelope.type.empty()) out["type"] = envelope.type;
  for (const auto& [name, stubs] : envelope.links) {
    if (stubs.empty()) continue;
    json list = json::array();
    for (const auto& stub : stubs) list.push_back(toJson(stub));
    out[name] = std::move(list);
  }
  for (const auto& [name, scalars] : envelope.values) {
    if (!scalars.empty()) out[name] = scalars;
  }
  return out;
}

// ____________________________________________________________________________
ResourceEnvelope envelopeFromJson(const json& value, const ContextMap& context,
                                  const std::string& path) {
  if (!value.is_object()) throw ValidationError(path, "expected an object");
  ResourceEnvelope envelope;
  auto stringList = [&](const std::string& key, const json& field) {
    std::vector<std::string> out;
    if (field.is_null()) return out;
    if (!field.is_array()) throw ValidationError(fieldPath(path, key), "expected an array");
    for (std::size_t i = 0; i < field.size(); ++i) {
      if (!field[i].is_string()) {
        throw ValidationError(indexPath(fieldPath(path, key), i), "expected string");
      }
      out.push_back(field[i].get<std::string>());
    }
    return out;
  };

  for (const auto& [key, field] : value.items()) {
    const std::string here = fieldPath(path, key);
    if (key == "id") {
      if (!field.is_string() || field.get<std::string>().empty()) {
        throw ValidationError(here, "id must be a non-empty string");
      }
      envelope.id = field.get<std::string>();
    } else if (key == "label") {
      envelope.label = stringList(key, field);
    } else if (key == "type") {
      envelope.type = stringList(key, field);
    } else {
      const TermDefinition* def = context.term(key);
      if (def == nullptr || def->kind == TermKind::Keyword || def->kind == TermKind::Class) {
        throw ValidationError(here, "unknown field '" + key + "'");
      }
      if (field.is_null()) continue;
      if (!field.is_array()) throw ValidationError(here, "expected an array");
      for (std::size_t i = 0; i < field.size(); ++i) {
        const std::string at = indexPath(here, i);
        if (def->kind == TermKind::ObjectProperty) {
          envelope.links[key].push_back(envelopeFromJson(field[i], context, at));
        } else if (field[i].is_primitive() && !field[i].is_null()) {
          envelope.values[key].push_back(field[i]);
        } else {
          throw ValidationError(at, "expected a scalar value");
        }
      }
    }
  }
  return envelope;
}

// ____________________________________________________________________________
json literalToJson(const Term& literal) {
  const std::string& lexical = literal.value;
  if (!literal.language.empty() || literal.datatype.empty()) return lexical;
  switch (compiler::datatypeToScalar(literal.datatype).type) {
    case ScalarType::Integer: {
      std::string_view digits = lexical;
      if (digits.starts_with('+')) digits.remove_prefix(1);
      long long v = 0;
      auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec == std::errc() && end == digits.data() + digits.size() && !digits.empty() &&
          digits.front() != '+') {
        return v;
      }
      return lexical;
    }
    case ScalarType::Number: {
      static const std::regex number(R"([+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)");
      if (!std::regex_match(lexical, number)) return lexical;
      double v = std::strtod(lexical.c_str(), nullptr);
      if (!std::isfinite(v)) return lexical;
      return v;
    }
    case ScalarType::Boolean:
      if (lexical == "true" || lexical == "1") return true;
      if (lexical == "false" || lexical == "0") return false;
      return lexical;
    case ScalarType::String:
      break;
  }
  return lexical;
}

namespace {

// ____________________________________________________________________________
class Framer {
 public:
  Framer(const rdf::Graph& graph, const ContextMap& context, const std::string& prefix,
         Warnings* warnings)
      : context_(context), prefix_(prefix), warnings_(warnings) {
    for (const auto& t : graph) bySubject_[t.subject].push_back(&t);
  }

  std::optional<ResourceEnvelope> frame(const std::string& rootIri) {
    auto it = bySubject_.find(Term::iri(rootIri));
    if (it == bySubject_.end()) return std::nullopt;
    ResourceEnvelope envelope = header(it->first);
    for (const Triple* t : it->second) {
      const std::string& p = t->predicate.value;
      if (p == vocab::kRdfType || p == vocab::kRdfsLabel) continue;
      const std::string* name = context_.nameForIri(p);
      const TermDefinition* def = name ? context_.term(*name) : nullptr;
      if (def == nullptr || def->kind == TermKind::Class) {
        warnOnce("predicate <" + p + "> is not in the context; dropped");
        continue;
      }
      if (def->kind == TermKind::ObjectProperty) {
        if (t->object.isBlank()) {
          warnOnce("blank node value of <" + p + "> has no id; dropped");
        } else if (t->object.isIri()) {
          envelope.links[*name].push_back(header(t->object));
        } else {
          warnOnce("literal value of object property <" + p + ">; dropped");
        }
      } else if (t->object.isLiteral()) {
        envelope.values[*name].push_back(literalToJson(t->object));
      } else {
        warnOnce("resource value of datatype property <" + p + ">; dropped");
      }
    }
    envelope.normalize();
    return envelope;
  }

 private:
  // id, labels and types of a node.
  ResourceEnvelope header(const Term& node) {
    ResourceEnvelope envelope;
    envelope.id = encodeId(node.value, prefix_);
    auto it = bySubject_.find(node);
    if (it == bySubject_.end()) return envelope;
    std::vector<const Term*> labels;
    bool hasEnglish = false;
    for (const Triple* t : it->second) {
      if (t->predicate.value == vocab::kRdfType && t->object.isIri()) {
        const std::string* name = context_.nameForIri(t->object.value);
        bool isClass = name && context_.term(*name)->kind == TermKind::Class;
        envelope.type.push_back(isClass ? *name : t->object.value);
      } else if (t->predicate.value == vocab::kRdfsLabel && t->object.isLiteral()) {
        labels.push_back(&t->object);
        hasEnglish = hasEnglish || isEnglish(t->object.language);
      }
    }
    for (const Term* l : labels) {
      if (!hasEnglish || l->language.empty() || isEnglish(l->language)) {
        envelope.label.push_back(l->value);
      }
    }
    envelope.normalize();
    return envelope;
  }

  void warnOnce(std::string message) {
    if (warned_.insert(message).second) warn(warnings_, std::move(message));
  }

  const ContextMap& context_;
  const std::string& prefix_;
  Warnings* warnings_;
  std::map<Term, std::vector<const Triple*>> bySubject_;
  std::set<std::string> warned_;
};

}  // namespace

// ____________________________________________________________________________
std::vector<ResourceEnvelope> frameRoots(const rdf::Graph& graph,
                                         const std::vector<std::string>& roots,
                                         const ContextMap& context,
                                         const std::string& instancePrefix,
                                         Warnings* warnings) {
  Framer framer(graph, context, instancePrefix, warnings);
  std::vector<ResourceEnvelope> out;
  for (const auto& root : roots) {
    if (auto envelope = framer.frame(root)) out.push_back(std::move(*envelope));
  }
  return out;
}

// ____________________________________________________________________________
std::vector<ResourceEnvelope> frameResults(const rdf::Graph& graph,
                                           const std::string& rootClass,
                                           const std::optional<std::string>& rootIri,
                                           const ContextMap& context,
                                           const std::string& instancePrefix,
                                           Warnings* warnings) {
  std::vector<std::string> roots;
  if (rootIri) {
    roots.push_back(*rootIri);
  } else {
    for (const auto& s : graph.subjects(Term::iri(std::string(vocab::kRdfType)),
                                        Term::iri(rootClass))) {
      if (s.isIri()) roots.push_back(s.value);
    }
    sortUnique(roots);
  }
  return frameRoots(graph, roots, context, instancePrefix, warnings);
}

namespace {

// ____________________________________________________________________________
Term resourceIri(const std::optional<std::string>& id, const std::string& prefix,
                 const std::string& path) {
  if (!id || id->empty()) throw ValidationError(fieldPath(path, "id"), "missing id");
  std::string iri = decodeId(*id, prefix);
  if (!isAbsoluteIri(iri) || !rdf::isSafeIri(iri)) {
    throw ValidationError(fieldPath(path, "id"), "'" + *id + "' is not a valid identifier");
  }
  return Term::iri(std::move(iri));
}

// ____________________________________________________________________________
Term scalarLiteral(const json& value, const TermDefinition& def, const std::string& path) {
  std::string lexical;
  if (value.is_string()) {
    lexical = value.get<std::string>();
  } else if (value.is_boolean()) {
    lexical = value.get<bool>() ? "true" : "false";
  } else if (value.is_number()) {
    lexical = value.dump();
  } else {
    throw ValidationError(path, "expected a scalar value");
  }
  if (!def.datatype) {
    if (value.is_string()) return Term::literal(lexical);
    if (value.is_boolean()) return Term::literal(lexical, vocab::kXsdBoolean);
    if (value.is_number_integer()) return Term::literal(lexical, vocab::kXsdInteger);
    return Term::literal(lexical, vocab::kXsdDouble);
  }
  auto type = compiler::datatypeToScalar(*def.datatype).type;
  bool fits = (type == ScalarType::String && value.is_string()) ||
              (type == ScalarType::Integer && value.is_number_integer()) ||
              (type == ScalarType::Number && value.is_number()) ||
              (type == ScalarType::Boolean && value.is_boolean());
  if (!fits) {
    throw ValidationError(path, "expected " + std::string(compiler::toString(type)));
  }
  return Term::literal(lexical, *def.datatype);
}

}  // namespace

// ____________________________________________________________________________
std::vector<Triple> envelopeToTriples(const ResourceEnvelope& resource,
                                      const ContextMap& context,
                                      const std::string& instancePrefix) {
  std::vector<Triple> triples;
  Term subject = resourceIri(resource.id, instancePrefix, "");
  const Term rdfType = Term::iri(std::string(vocab::kRdfType));
  const Term rdfsLabel = Term::iri(std::string(vocab::kRdfsLabel));

  for (std::size_t i = 0; i < resource.type.size(); ++i) {
    const std::string& name = resource.type[i];
    const TermDefinition* def = context.term(name);
    if (def != nullptr && def->kind == TermKind::Class) {
      triples.push_back({subject, rdfType, Term::iri(def->iri)});
    } else if (isAbsoluteIri(name) && rdf::isSafeIri(name)) {
      triples.push_back({subject, rdfType, Term::iri(name)});
    } else {
      throw ValidationError(indexPath("type", i), "unknown class '" + name + "'");
    }
  }
  for (const auto& label : resource.label) {
    triples.push_back({subject, rdfsLabel, Term::literal(label)});
  }
  for (const auto& [name, stubs] : resource.links) {
    const TermDefinition* def = context.term(name);
    if (def == nullptr || def->kind != TermKind::ObjectProperty) {
      throw ValidationError(name, "unknown field '" + name + "'");
    }
    for (std::size_t i = 0; i < stubs.size(); ++i) {
      triples.push_back({subject, Term::iri(def->iri),
                         resourceIri(stubs[i].id, instancePrefix, indexPath(name, i))});
    }
  }
  for (const auto& [name, scalars] : resource.values) {
    const TermDefinition* def = context.term(name);
    if (def == nullptr || def->kind != TermKind::DatatypeProperty ||
        def->iri == vocab::kRdfsLabel) {
      throw ValidationError(name, "unknown field '" + name + "'");
    }
    for (std::size_t i = 0; i < scalars.size(); ++i) {
      triples.push_back(
          {subject, Term::iri(def->iri), scalarLiteral(scalars[i], *def, indexPath(name, i))});
    }
  }
  return triples;
}

}  // namespace ontoapi::jsonld
