#pragma once

// Depth-1 framing oracle over a flat triple list and a random graph
// generator, both for the world fixture's context. Written against the
// framing contract only; shares no code with the bridge.

#include <algorithm>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontoapi/rdf/graph.h"
#include "ontoapi/rdf/vocab.h"

namespace ontoapi::testing::oracle {

using nlohmann::json;
using rdf::Graph;
using rdf::Term;
using rdf::Triple;

inline const std::string kWorld = "https://w3id.org/example/world#";
inline const std::string kPrefix = "https://ex.org/i/";
inline const std::string kXsd = "http://www.w3.org/2001/XMLSchema#";

inline Term iri(const std::string& value) { return Term::iri(value); }
inline Term rdfType() { return iri(std::string(vocab::kRdfType)); }
inline Term rdfsLabel() { return iri(std::string(vocab::kRdfsLabel)); }

struct OracleField {
  bool object;
  std::string datatype;
};

inline const std::map<std::string, std::string> kOracleClasses = {
    {kWorld + "Entity", "Entity"}, {kWorld + "Region", "Region"},
    {kWorld + "Country", "Country"}, {kWorld + "City", "City"},
    {kWorld + "Person", "Person"}, {kWorld + "Cat", "Cat"}};

inline const std::map<std::string, std::pair<std::string, OracleField>> kOracleFields = {
    {kWorld + "partOfRegion", {"partOfRegion", {true, ""}}},
    {kWorld + "livesIn", {"livesIn", {true, ""}}},
    {kWorld + "hasPet", {"hasPet", {true, ""}}},
    {kWorld + "population", {"population", {false, kXsd + "integer"}}},
    {kWorld + "area", {"area", {false, kXsd + "double"}}},
    {kWorld + "isCapital", {"isCapital", {false, kXsd + "boolean"}}},
    {kWorld + "name", {"name", {false, kXsd + "string"}}}};

inline std::string oracleId(const std::string& value) {
  if (value.rfind(kPrefix, 0) == 0 && value.size() > kPrefix.size()) {
    return value.substr(kPrefix.size());
  }
  return value;
}

inline json oracleScalar(const Term& o) {
  if (!o.language.empty()) return o.value;
  if (o.datatype == kXsd + "integer" && std::regex_match(o.value, std::regex("-?[0-9]{1,15}"))) {
    return std::stoll(o.value);
  }
  if (o.datatype == kXsd + "double" && std::regex_match(o.value, std::regex("-?[0-9]+\\.[0-9]+"))) {
    return std::stod(o.value);
  }
  if (o.datatype == kXsd + "boolean" && (o.value == "true" || o.value == "false")) {
    return o.value == "true";
  }
  return o.value;
}

inline json oracleHeader(const std::vector<Triple>& triples, const Term& node) {
  json out = {{"id", oracleId(node.value)}};
  std::set<std::string> types;
  std::vector<std::pair<std::string, std::string>> labels;
  for (const auto& t : triples) {
    if (t.subject != node) continue;
    if (t.predicate == rdfType() && t.object.isIri()) {
      auto it = kOracleClasses.find(t.object.value);
      types.insert(it == kOracleClasses.end() ? t.object.value : it->second);
    }
    if (t.predicate == rdfsLabel()) labels.emplace_back(t.object.value, t.object.language);
  }
  bool english = std::any_of(labels.begin(), labels.end(),
                             [](const auto& l) { return l.second == "en"; });
  std::set<std::string> kept;
  for (const auto& [value, lang] : labels) {
    if (!english || lang.empty() || lang == "en") kept.insert(value);
  }
  if (!types.empty()) out["type"] = types;
  if (!kept.empty()) out["label"] = kept;
  return out;
}

inline json oracleFrame(const std::vector<Triple>& triples, const Term& root) {
  bool present = std::any_of(triples.begin(), triples.end(),
                             [&](const Triple& t) { return t.subject == root; });
  if (!present) return nullptr;
  json out = oracleHeader(triples, root);
  std::map<std::string, std::map<std::string, json>> links;
  std::map<std::string, std::set<json>> values;
  for (const auto& t : triples) {
    if (t.subject != root) continue;
    auto it = kOracleFields.find(t.predicate.value);
    if (it == kOracleFields.end()) continue;
    const auto& [name, field] = it->second;
    if (field.object && t.object.isIri()) {
      links[name][oracleId(t.object.value)] = oracleHeader(triples, t.object);
    } else if (!field.object && t.object.isLiteral()) {
      values[name].insert(oracleScalar(t.object));
    }
  }
  for (const auto& [name, byId] : links) {
    for (const auto& [id, stub] : byId) out[name].push_back(stub);
  }
  for (const auto& [name, set] : values) out[name] = set;
  return out;
}

inline std::vector<Triple> randomGraph(std::mt19937& rng) {
  std::vector<Term> nodes;
  for (int i = 0; i < 6; ++i) nodes.push_back(iri(kPrefix + "n" + std::to_string(i)));
  nodes.push_back(iri("http://other.org/x"));
  nodes.push_back(Term::blank("b"));
  std::vector<Term> classes{iri(kWorld + "Region"), iri(kWorld + "City"),
                            iri(kWorld + "Cat"), iri("http://other.org/Thing")};
  std::vector<Term> predicates{rdfType(), rdfsLabel(), iri(kWorld + "partOfRegion"),
                               iri(kWorld + "livesIn"), iri(kWorld + "population"),
                               iri(kWorld + "area"), iri(kWorld + "isCapital"),
                               iri(kWorld + "name"), iri(kWorld + "notes"),
                               iri("http://other.org/p")};
  auto pick = [&](const auto& v) { return v[rng() % v.size()]; };
  std::vector<Term> literals{
      Term::literal("12", kXsd + "integer"), Term::literal("-3", kXsd + "integer"),
      Term::literal("x1", kXsd + "integer"), Term::literal("2.5", kXsd + "double"),
      Term::literal("true", kXsd + "boolean"), Term::literal("false", kXsd + "boolean"),
      Term::literal("maybe", kXsd + "boolean"), Term::literal("plain"),
      Term::langLiteral("hello", "en"), Term::langLiteral("hola", "es"),
      Term::literal("12")};
  Graph g;
  for (std::size_t n = rng() % 51; n > 0; --n) {
    Term s = pick(nodes);
    Term p = pick(predicates);
    Term o = p == rdfType()           ? pick(classes)
             : p == rdfsLabel()       ? pick(literals)
             : rng() % 2 == 0         ? pick(nodes)
                                      : pick(literals);
    g.insert({s, p, o});
  }
  return {g.begin(), g.end()};
}


}  // namespace ontoapi::testing::oracle
