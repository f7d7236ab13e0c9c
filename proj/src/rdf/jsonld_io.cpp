#include "ontoapi/rdf/jsonld_io.h"

#include <map>
#include <optional>
#include <stdexcept>

#include "ontoapi/rdf/turtle.h"
#include "ontoapi/rdf/vocab.h"

namespace ontoapi::rdf {

namespace {

using nlohmann::json;

struct TermDefinition {
  std::string iri;
  std::string typeMapping;  // "@id" or a datatype IRI
};

class JsonLdReader {
 public:
  Graph read(const json& document) {
    if (document.is_object() && document.contains("@context")) {
      loadContext(document["@context"]);
    }
    if (document.is_array()) {
      for (const auto& node : document) readTopLevel(node);
    } else {
      readTopLevel(document);
    }
    return std::move(graph_);
  }

 private:
  void readTopLevel(const json& node) {
    if (!node.is_object()) {
      throw std::runtime_error("JSON-LD: top-level items must be objects");
    }
    if (node.contains("@context")) loadContext(node["@context"]);
    if (node.contains("@graph")) {
      for (const auto& inner : node["@graph"]) readNode(inner);
      bool onlyGraph = true;
      for (const auto& item : node.items()) {
        if (item.key() != "@graph" && item.key() != "@context") onlyGraph = false;
      }
      if (onlyGraph) return;
    }
    readNode(node);
  }

  void loadContext(const json& context) {
    if (context.is_array()) {
      for (const auto& part : context) loadContext(part);
      return;
    }
    if (!context.is_object()) return;
    for (const auto& [key, value] : context.items()) {
      if (key == "@vocab" && value.is_string()) {
        vocab_ = value.get<std::string>();
        continue;
      }
      if (key.starts_with("@")) continue;
      TermDefinition def;
      if (value.is_string()) {
        def.iri = value.get<std::string>();
      } else if (value.is_object()) {
        def.iri = value.value("@id", key);
        def.typeMapping = value.value("@type", std::string());
      } else {
        continue;
      }
      terms_[key] = def;
    }
    // Expand compact IRIs used inside the definitions themselves.
    for (auto& [key, def] : terms_) {
      def.iri = expandIri(def.iri, /*vocabRelative=*/false);
      if (!def.typeMapping.empty() && def.typeMapping != "@id" &&
          def.typeMapping != "@vocab") {
        def.typeMapping = expandIri(def.typeMapping, false);
      }
    }
  }

  std::string expandIri(const std::string& value, bool vocabRelative) const {
    if (value.starts_with("_:")) return value;
    if (auto it = terms_.find(value); it != terms_.end() && vocabRelative) {
      return it->second.iri;
    }
    auto colon = value.find(':');
    if (colon != std::string::npos) {
      auto prefix = value.substr(0, colon);
      auto rest = value.substr(colon + 1);
      if (!rest.starts_with("//")) {
        if (auto it = terms_.find(prefix); it != terms_.end()) {
          return it->second.iri + rest;
        }
      }
      return value;
    }
    if (vocabRelative && !vocab_.empty()) return vocab_ + value;
    return value;
  }

  Term nodeTerm(const std::string& id) {
    if (id.starts_with("_:")) return Term::blank(blankScope_ + id.substr(2));
    return Term::iri(expandIri(id, false));
  }

  Term freshBlank() {
    return Term::blank(blankScope_ + "j" + std::to_string(counter_++));
  }

  Term readNode(const json& node) {
    Term subject = node.contains("@id")
                       ? nodeTerm(node["@id"].get<std::string>())
                       : freshBlank();
    for (const auto& [key, value] : node.items()) {
      if (key == "@id" || key == "@context" || key == "@graph") continue;
      if (key == "@type") {
        for (const auto& type : asArray(value)) {
          graph_.insert({subject, Term::iri(std::string(vocab::kRdfType)),
                         nodeTermVocab(type.get<std::string>())});
        }
        continue;
      }
      if (key.starts_with("@")) continue;
      const TermDefinition* def = nullptr;
      if (auto it = terms_.find(key); it != terms_.end()) def = &it->second;
      Term predicate = Term::iri(def ? def->iri : expandIri(key, true));
      for (const auto& item : asArray(value)) {
        for (auto& object : readValue(item, def)) {
          graph_.insert({subject, predicate, std::move(object)});
        }
      }
    }
    return subject;
  }

  Term nodeTermVocab(const std::string& id) {
    if (id.starts_with("_:")) return nodeTerm(id);
    return Term::iri(expandIri(id, true));
  }

  static std::vector<json> asArray(const json& value) {
    if (value.is_array()) return value.get<std::vector<json>>();
    return {value};
  }

  std::vector<Term> readValue(const json& item, const TermDefinition* def) {
    if (item.is_null()) return {};
    if (item.is_object()) {
      if (item.contains("@value")) {
        const auto& v = item["@value"];
        std::string lexical = v.is_string() ? v.get<std::string>() : v.dump();
        if (item.contains("@language")) {
          return {Term::langLiteral(lexical, item["@language"].get<std::string>())};
        }
        if (item.contains("@type")) {
          return {Term::literal(lexical,
                                expandIri(item["@type"].get<std::string>(), true))};
        }
        return {nativeLiteral(v)};
      }
      if (item.contains("@list")) {
        Term head = Term::iri(std::string(vocab::kRdfNil));
        auto items = asArray(item["@list"]);
        for (auto it = items.rbegin(); it != items.rend(); ++it) {
          Term cell = freshBlank();
          for (auto& first : readValue(*it, def)) {
            graph_.insert({cell, Term::iri(std::string(vocab::kRdfFirst)), first});
          }
          graph_.insert({cell, Term::iri(std::string(vocab::kRdfRest)), head});
          head = cell;
        }
        return {head};
      }
      if (item.size() == 1 && item.contains("@id")) {
        return {nodeTerm(item["@id"].get<std::string>())};
      }
      return {readNode(item)};
    }
    if (item.is_string() && def && def->typeMapping == "@id") {
      return {nodeTerm(item.get<std::string>())};
    }
    if (item.is_string() && def && !def->typeMapping.empty() &&
        def->typeMapping != "@vocab") {
      return {Term::literal(item.get<std::string>(), def->typeMapping)};
    }
    return {nativeLiteral(item)};
  }

  static Term nativeLiteral(const json& v) {
    if (v.is_boolean()) {
      return Term::literal(v.get<bool>() ? "true" : "false", vocab::kXsdBoolean);
    }
    if (v.is_number_integer() || v.is_number_unsigned()) {
      return Term::literal(v.dump(), vocab::kXsdInteger);
    }
    if (v.is_number_float()) return Term::literal(v.dump(), vocab::kXsdDouble);
    if (v.is_string()) return Term::literal(v.get<std::string>());
    return Term::literal(v.dump());
  }

  Graph graph_;
  std::map<std::string, TermDefinition> terms_;
  std::string vocab_;
  std::string blankScope_ = freshBlankScope();
  unsigned long counter_ = 0;
};

json termToJson(const Term& term) {
  if (term.isIri()) return json{{"@id", term.value}};
  if (term.isBlank()) return json{{"@id", "_:" + term.value}};
  json value{{"@value", term.value}};
  if (!term.language.empty()) {
    value["@language"] = term.language;
  } else if (!term.datatype.empty()) {
    value["@type"] = term.datatype;
  }
  return value;
}

}  // namespace

// ____________________________________________________________________________
Graph parseJsonLd(const nlohmann::json& document) {
  return JsonLdReader().read(document);
}

// ____________________________________________________________________________
nlohmann::json toExpandedJsonLd(const Graph& graph) {
  json out = json::array();
  std::optional<Term> current;
  json node;
  auto flush = [&] {
    if (current) out.push_back(std::move(node));
  };
  for (const auto& t : graph) {
    if (!current || t.subject != *current) {
      flush();
      current = t.subject;
      node = json::object();
      node["@id"] = t.subject.isBlank() ? "_:" + t.subject.value : t.subject.value;
    }
    if (t.predicate.value == vocab::kRdfType && !t.object.isLiteral()) {
      node["@type"].push_back(t.object.isBlank() ? "_:" + t.object.value
                                                 : t.object.value);
    } else {
      node[t.predicate.value].push_back(termToJson(t.object));
    }
  }
  flush();
  return out;
}

}  // namespace ontoapi::rdf
