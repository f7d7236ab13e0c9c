#include "ontoapi/ontology/model.h"

#include <algorithm>
#include <deque>

#include "ontoapi/rdf/graph.h"
#include "ontoapi/rdf/rdfxml.h"
#include "ontoapi/rdf/turtle.h"
#include "ontoapi/rdf/vocab.h"

namespace ontoapi::ontology {

using rdf::Graph;
using rdf::Term;

namespace {

Term iri(std::string_view value) { return Term::iri(std::string(value)); }

std::vector<Term> listMembers(const Graph& graph, Term head) {
  std::vector<Term> members;
  std::set<Term> seen;
  while (!(head.isIri() && head.value == vocab::kRdfNil)) {
    if (!seen.insert(head).second) break;
    auto first = graph.objects(head, iri(vocab::kRdfFirst));
    auto rest = graph.objects(head, iri(vocab::kRdfRest));
    if (first.empty() || rest.empty()) break;
    members.push_back(first.front());
    head = rest.front();
  }
  return members;
}

bool isEnglish(const std::string& lang) {
  return lang == "en" || lang.starts_with("en-");
}

std::optional<std::string> pickComment(const Graph& graph, const Term& subject) {
  auto values = graph.objects(subject, iri(vocab::kRdfsComment));
  std::vector<std::string> english, untagged, any;
  for (const auto& v : values) {
    if (!v.isLiteral()) continue;
    if (isEnglish(v.language)) english.push_back(v.value);
    if (v.language.empty()) untagged.push_back(v.value);
    any.push_back(v.value);
  }
  for (auto* bucket : {&english, &untagged, &any}) {
    if (!bucket->empty()) return *std::ranges::min_element(*bucket);
  }
  return std::nullopt;
}

std::set<Term> typedSubjects(const Graph& graph, std::string_view type) {
  std::set<Term> result;
  for (auto& s : graph.subjects(iri(vocab::kRdfType), iri(type))) {
    result.insert(std::move(s));
  }
  return result;
}

// Expands a domain/range expression into named IRIs: a named class as is,
// a top-level owl:unionOf into its named members. Anything else is ignored
// with a warning.
std::set<std::string> namedMembers(const Graph& graph, const Term& expression,
                                   const std::string& context,
                                   Warnings* warnings) {
  std::set<std::string> result;
  if (expression.isIri()) {
    result.insert(expression.value);
    return result;
  }
  if (!expression.isBlank()) return result;
  auto unions = graph.objects(expression, iri(vocab::kOwlUnionOf));
  if (!unions.empty()) {
    for (const auto& member : listMembers(graph, unions.front())) {
      if (member.isIri()) {
        result.insert(member.value);
      } else {
        warn(warnings, context + ": nested anonymous class in union ignored");
      }
    }
    return result;
  }
  if (!graph.objects(expression, iri(vocab::kOwlIntersectionOf)).empty()) {
    warn(warnings, context + ": intersection expression ignored");
  } else {
    warn(warnings, context + ": anonymous class expression ignored");
  }
  return result;
}

void checkUniqueLocalNames(const auto& entries, std::string_view what) {
  std::map<std::string, std::string> byName;
  for (const auto& [entryIri, info] : entries) {
    auto [it, inserted] = byName.emplace(info.localName, entryIri);
    if (!inserted) {
      throw ModelError(std::string(what) + " local name '" + info.localName +
                       "' is shared by <" + it->second + "> and <" + entryIri +
                       ">");
    }
  }
}

}  // namespace

// ____________________________________________________________________________
const ClassInfo& OntologyModel::classInfo(const std::string& classIri) const {
  auto it = classes.find(classIri);
  if (it == classes.end()) throw NotFoundError("unknown class <" + classIri + ">");
  return it->second;
}

// ____________________________________________________________________________
const ClassInfo* OntologyModel::findClassByLocalName(
    const std::string& name) const {
  for (const auto& [key, info] : classes) {
    if (info.localName == name) return &info;
  }
  return nullptr;
}

// ____________________________________________________________________________
OntologyModel loadOntology(std::span<const SourceDocument> documents,
                           Warnings* warnings) {
  OntologyModel model;
  Graph graph;
  for (const auto& document : documents) {
    try {
      auto parsed = document.syntax == Syntax::RdfXml
                        ? rdf::parseRdfXml(document.content, document.name)
                        : rdf::parseTurtle(document.content, document.name);
      graph.merge(parsed.dataset.defaultGraph);
      for (const auto& [name, named] : parsed.dataset.namedGraphs) {
        graph.merge(named);
      }
      for (auto& [prefix, ns] : parsed.prefixes) {
        model.prefixes.emplace(prefix, ns);
      }
    } catch (const rdf::SyntaxError& e) {
      auto message = std::string(e.what());
      if (auto colon = message.find(": "); colon != std::string::npos) {
        message = message.substr(colon + 2);
      }
      throw LoadError(document.name, e.line(), message);
    }
  }

  for (const auto& subject : typedSubjects(graph, vocab::kOwlOntology)) {
    if (subject.isIri()) model.ontologyIris.push_back(subject.value);
  }

  std::set<Term> classTerms = typedSubjects(graph, vocab::kOwlClass);
  classTerms.merge(typedSubjects(graph, vocab::kRdfsClass));
  for (const auto& term : classTerms) {
    if (!term.isIri()) continue;
    ClassInfo info;
    info.iri = term.value;
    info.localName = rdf::localName(term.value);
    info.comment = pickComment(graph, term);
    if (info.localName.empty()) {
      warn(warnings, "class <" + term.value + "> has no local name; skipped");
      continue;
    }
    model.classes.emplace(info.iri, std::move(info));
  }
  for (auto& [classIri, info] : model.classes) {
    for (const auto& super :
         graph.objects(Term::iri(classIri), iri(vocab::kRdfsSubClassOf))) {
      if (!super.isIri() || super.value == vocab::kOwlThing ||
          super.value == classIri) {
        continue;
      }
      if (!model.classes.contains(super.value)) {
        warn(warnings, "superclass <" + super.value + "> of <" + classIri +
                           "> is not declared; ignored");
        continue;
      }
      info.directSuperclasses.insert(super.value);
    }
  }

  auto objectProps = typedSubjects(graph, vocab::kOwlObjectProperty);
  auto datatypeProps = typedSubjects(graph, vocab::kOwlDatatypeProperty);
  auto functional = typedSubjects(graph, vocab::kOwlFunctionalProperty);
  auto addProperty = [&](const Term& term, PropertyKind kind) {
    if (!term.isIri() || model.properties.contains(term.value)) return;
    PropertyInfo info;
    info.iri = term.value;
    info.localName = rdf::localName(term.value);
    info.comment = pickComment(graph, term);
    info.kind = kind;
    info.functional = functional.contains(term);
    std::string context = "property <" + term.value + ">";
    for (const auto& domain : graph.objects(term, iri(vocab::kRdfsDomain))) {
      info.domains.merge(namedMembers(graph, domain, context + " domain", warnings));
    }
    for (const auto& range : graph.objects(term, iri(vocab::kRdfsRange))) {
      for (auto& member :
           namedMembers(graph, range, context + " range", warnings)) {
        if (kind == PropertyKind::Object) {
          if (member == vocab::kOwlThing) continue;
          if (!model.classes.contains(member)) {
            warn(warnings, context + ": range <" + member +
                               "> is not a declared class; ignored");
            continue;
          }
        }
        info.ranges.insert(std::move(member));
      }
    }
    model.properties.emplace(info.iri, std::move(info));
  };
  for (const auto& term : objectProps) {
    if (datatypeProps.contains(term)) {
      warn(warnings, "property <" + term.value +
                         "> is declared both object and datatype; using object");
    }
    addProperty(term, PropertyKind::Object);
  }
  for (const auto& term : datatypeProps) addProperty(term, PropertyKind::Datatype);

  checkUniqueLocalNames(model.classes, "class");
  checkUniqueLocalNames(model.properties, "property");
  return model;
}

// ____________________________________________________________________________
std::set<std::string> superclassClosure(const OntologyModel& model,
                                        const std::string& classIri) {
  model.classInfo(classIri);
  std::set<std::string> visited;
  std::deque<std::string> queue{classIri};
  while (!queue.empty()) {
    auto current = std::move(queue.front());
    queue.pop_front();
    auto it = model.classes.find(current);
    if (it == model.classes.end()) continue;
    for (const auto& super : it->second.directSuperclasses) {
      if (visited.insert(super).second) queue.push_back(super);
    }
  }
  visited.erase(classIri);
  return visited;
}

// ____________________________________________________________________________
std::vector<const PropertyInfo*> effectiveProperties(const OntologyModel& model,
                                                     const std::string& classIri,
                                                     bool includeUndomained) {
  auto lineage = superclassClosure(model, classIri);
  lineage.insert(classIri);
  std::vector<const PropertyInfo*> result;
  for (const auto& [propIri, info] : model.properties) {
    bool applies =
        info.domains.empty()
            ? includeUndomained
            : std::ranges::any_of(info.domains, [&](const std::string& d) {
                return lineage.contains(d);
              });
    if (applies) result.push_back(&info);
  }
  std::ranges::sort(result, {}, &PropertyInfo::localName);
  return result;
}

}  // namespace ontoapi::ontology
