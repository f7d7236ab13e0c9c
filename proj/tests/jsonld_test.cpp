#include <gmock/gmock.h>

#include <random>
#include <regex>

#include "ontoapi/compiler/compiler.h"
#include "ontoapi/compiler/validation.h"
#include "ontoapi/jsonld/bridge.h"
#include "ontoapi/rdf/vocab.h"
#include "support/frame_oracle.h"

using namespace ontoapi;
using namespace ontoapi::jsonld;
using nlohmann::json;
using rdf::Graph;
using rdf::Term;
using rdf::Triple;
using ::testing::HasSubstr;
using ontoapi::testing::oracle::oracleFrame;
using ontoapi::testing::oracle::randomGraph;

namespace {

const std::string kWorld = "https://w3id.org/example/world#";
const std::string kRegions = "https://w3id.org/example/regions#";
const std::string kPrefix = "https://ex.org/i/";
const std::string kXsd = "http://www.w3.org/2001/XMLSchema#";

ontology::OntologyModel loadFixture(const std::string& file) {
  auto doc = ontology::readSource(std::string(ONTOAPI_TEST_DATA) + "/" + file);
  return ontology::loadOntology(std::span(&doc, 1));
}

std::set<std::string> allClasses(const ontology::OntologyModel& model) {
  std::set<std::string> out;
  for (const auto& [iri, cls] : model.classes) out.insert(iri);
  return out;
}

const ContextMap& worldContext() {
  static const ContextMap context = [] {
    auto model = loadFixture("world.ttl");
    return generateContext(model, allClasses(model));
  }();
  return context;
}

const ContextMap& regionContext() {
  static const ContextMap context = [] {
    auto model = loadFixture("region.ttl");
    return generateContext(model, allClasses(model));
  }();
  return context;
}

Term iri(const std::string& value) { return Term::iri(value); }
Term rdfType() { return iri(std::string(vocab::kRdfType)); }
Term rdfsLabel() { return iri(std::string(vocab::kRdfsLabel)); }

}  // namespace

// _____________________________________________________________________________
TEST(GenerateContext, regionTerms) {
  const auto& terms = regionContext().terms();
  ASSERT_EQ(terms.size(), 5u);
  EXPECT_EQ(terms.at("Region"), (TermDefinition{kRegions + "Region", TermKind::Class}));
  EXPECT_EQ(terms.at("partOfRegion"),
            (TermDefinition{kRegions + "partOfRegion", TermKind::ObjectProperty, true}));
  EXPECT_EQ(terms.at("label").iri, vocab::kRdfsLabel);
  EXPECT_EQ(terms.at("id").iri, "@id");
  EXPECT_EQ(terms.at("type").iri, "@type");

  auto doc = toJson(regionContext());
  EXPECT_EQ(doc["@context"]["partOfRegion"],
            (json{{"@id", kRegions + "partOfRegion"}, {"@type", "@id"}, {"@container", "@set"}}));
  EXPECT_EQ(doc["@context"]["id"], "@id");
}

// _____________________________________________________________________________
TEST(GenerateContext, datatypeHintsAndScope) {
  const auto& ctx = worldContext();
  EXPECT_EQ(ctx.term("population")->datatype, kXsd + "integer");
  EXPECT_EQ(ctx.term("area")->datatype, kXsd + "double");
  EXPECT_EQ(ctx.term("identifier")->datatype, kWorld + "CustomDatatype");
  EXPECT_EQ(ctx.term("notes"), nullptr);
  EXPECT_EQ(ctx.term("livesIn")->kind, TermKind::ObjectProperty);

  auto model = loadFixture("world.ttl");
  auto empty = generateContext(model, {});
  EXPECT_EQ(empty.terms().size(), 3u);
  auto persons = generateContext(model, {kWorld + "Person"});
  EXPECT_NE(persons.term("hasPet"), nullptr);
  EXPECT_EQ(persons.term("population"), nullptr);
  auto undomained = generateContext(model, {kWorld + "Person"}, true);
  EXPECT_NE(undomained.term("notes"), nullptr);
}

// _____________________________________________________________________________
TEST(GenerateContext, jsonRoundTripOnFixtures) {
  for (const auto* file : {"region.ttl", "world.ttl", "music.ttl", "zoo.owl"}) {
    auto model = loadFixture(file);
    auto context = generateContext(model, allClasses(model));
    EXPECT_EQ(contextFromJson(json::parse(toJson(context).dump())), context) << file;
    // Every schema field and schema name has a term.
    auto spec = compiler::compileSpec(model, {});
    for (const auto& [name, schema] : spec.schemas) {
      EXPECT_NE(context.term(name), nullptr) << name;
      for (const auto& [field, prop] : schema.properties) {
        EXPECT_NE(context.term(field), nullptr) << file << " " << field;
      }
    }
  }
  EXPECT_THROW(contextFromJson(json::array()), std::runtime_error);
  EXPECT_THROW(contextFromJson({{"@context", {{"x", 3}}}}), std::runtime_error);
}

// _____________________________________________________________________________
TEST(PathClassTable, bijectionAndFormat) {
  auto model = loadFixture("world.ttl");
  auto table = buildPathTable(model, allClasses(model));
  EXPECT_EQ(*table.classFor("cities"), kWorld + "City");
  EXPECT_EQ(*table.segmentFor(kWorld + "Entity"), "entities");
  EXPECT_EQ(table.classFor("nope"), nullptr);
  auto text = serializePathTable(table);
  EXPECT_THAT(text, HasSubstr("persons\t" + kWorld + "Person\n"));
  EXPECT_EQ(parsePathTable("# comment\n\n" + text), table);
  for (const auto& [segment, classIri] : table.entries()) {
    EXPECT_EQ(*table.segmentFor(classIri), segment);
  }
  EXPECT_THROW(parsePathTable("a\thttp://x/A\na\thttp://x/B\n"), CompileError);
  EXPECT_THROW(parsePathTable("a\thttp://x/A\nb\thttp://x/A\n"), CompileError);
  EXPECT_THROW(parsePathTable("a http://x/A\n"), CompileError);
}

// _____________________________________________________________________________
TEST(IdCodec, examplesAndRoundTrip) {
  EXPECT_EQ(encodeId("https://ex.org/i/Texas", kPrefix), "Texas");
  EXPECT_EQ(encodeId("http://dbpedia.org/resource/Texas", kPrefix),
            "http://dbpedia.org/resource/Texas");
  EXPECT_EQ(decodeId("Texas", kPrefix), "https://ex.org/i/Texas");
  EXPECT_EQ(decodeId("http://dbpedia.org/resource/Texas", kPrefix),
            "http://dbpedia.org/resource/Texas");
  EXPECT_EQ(encodeId(kPrefix, kPrefix), kPrefix);
  EXPECT_EQ(encodeId(kPrefix + "urn:x", kPrefix), kPrefix + "urn:x");

  std::mt19937 rng(5);
  const std::string alphabet = "abcXYZ019-_.~:/%";
  for (int i = 0; i < 100; ++i) {
    std::string suffix(1, "abcdef"[rng() % 6]);
    for (std::size_t n = rng() % 12; n > 0; --n) suffix += alphabet[rng() % alphabet.size()];
    if (isAbsoluteIri(suffix)) continue;
    EXPECT_EQ(encodeId(decodeId(suffix, kPrefix), kPrefix), suffix);
    std::string full = kPrefix + suffix;
    EXPECT_EQ(decodeId(encodeId(full, kPrefix), kPrefix), full);
    std::string external = "http://other.org/" + suffix;
    EXPECT_EQ(decodeId(encodeId(external, kPrefix), kPrefix), external);
  }
}

// _____________________________________________________________________________
TEST(FrameResults, texasExample) {
  Graph g{{iri(kPrefix + "Texas"), rdfType(), iri(kRegions + "Region")},
          {iri(kPrefix + "Texas"), rdfsLabel(), Term::literal("Texas")},
          {iri(kPrefix + "Texas"), iri(kRegions + "partOfRegion"), iri(kPrefix + "USA")},
          {iri(kPrefix + "USA"), rdfType(), iri(kRegions + "Region")},
          {iri(kPrefix + "USA"), rdfsLabel(), Term::literal("USA")}};
  auto framed = frameResults(g, kRegions + "Region", kPrefix + "Texas", regionContext(), kPrefix);
  ASSERT_EQ(framed.size(), 1u);
  EXPECT_EQ(toJson(framed[0]), json::parse(R"({"id": "Texas", "type": ["Region"],
      "label": ["Texas"],
      "partOfRegion": [{"id": "USA", "type": ["Region"], "label": ["USA"]}]})"));

  auto all = frameResults(g, kRegions + "Region", std::nullopt, regionContext(), kPrefix);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[1].id, "USA");
  EXPECT_TRUE(frameResults(g, kRegions + "Region", kPrefix + "Nowhere", regionContext(), kPrefix)
                  .empty());
  EXPECT_TRUE(frameResults({}, kRegions + "Region", std::nullopt, regionContext(), kPrefix)
                  .empty());
}

// _____________________________________________________________________________
TEST(FrameResults, droppedValuesWarn) {
  Term t = iri(kPrefix + "T");
  Graph g{{t, rdfType(), iri(kRegions + "Region")},
          {t, iri("http://x/colour"), Term::literal("red")},
          {t, iri(kRegions + "partOfRegion"), Term::blank("b1")},
          {t, iri(kRegions + "partOfRegion"), Term::literal("oops")}};
  Warnings warnings;
  auto framed = frameRoots(g, {t.value}, regionContext(), kPrefix, &warnings);
  ASSERT_EQ(framed.size(), 1u);
  EXPECT_EQ(toJson(framed[0]), (json{{"id", "T"}, {"type", {"Region"}}}));
  ASSERT_EQ(warnings.size(), 3u);
  EXPECT_THAT(warnings[0] + warnings[1] + warnings[2], HasSubstr("http://x/colour"));
}

// _____________________________________________________________________________
TEST(FrameResults, labelsTypesAndLiterals) {
  Term c = iri(kPrefix + "c");
  auto lit = [](const std::string& v, const std::string& dt) { return Term::literal(v, kXsd + dt); };
  Graph g{{c, rdfType(), iri(kWorld + "City")},
          {c, rdfType(), iri("http://schema.org/Place")},
          {c, rdfsLabel(), Term::langLiteral("Sevilla", "es")},
          {c, rdfsLabel(), Term::langLiteral("Seville", "en")},
          {c, rdfsLabel(), Term::literal("Seville")},
          {c, rdfsLabel(), Term::literal("Hispalis")},
          {c, iri(kWorld + "population"), lit("+688592", "integer")},
          {c, iri(kWorld + "population"), lit("many", "integer")},
          {c, iri(kWorld + "area"), lit("140.8", "double")},
          {c, iri(kWorld + "isCapital"), lit("0", "boolean")},
          {c, iri(kWorld + "foundedOn"), lit("0712-01-01T00:00:00", "dateTime")}};
  auto framed = frameRoots(g, {c.value}, worldContext(), kPrefix);
  ASSERT_EQ(framed.size(), 1u);
  EXPECT_EQ(toJson(framed[0]), json::parse(R"({"id": "c",
      "type": ["City", "http://schema.org/Place"], "label": ["Hispalis", "Seville"],
      "population": [688592, "many"], "area": [140.8], "isCapital": [false],
      "foundedOn": ["0712-01-01T00:00:00"]})"));

  Graph noEnglish{{c, rdfsLabel(), Term::langLiteral("Sevilla", "es")},
                  {c, rdfsLabel(), Term::langLiteral("Séville", "fr")}};
  EXPECT_EQ(frameRoots(noEnglish, {c.value}, worldContext(), kPrefix)[0].label,
            (std::vector<std::string>{"Sevilla", "Séville"}));
}


// _____________________________________________________________________________
TEST(FrameResults, agreesWithTraversalOracle) {
  std::mt19937 rng(17);
  int nonEmpty = 0;
  for (int round = 0; round < 300; ++round) {
    auto triples = randomGraph(rng);
    Graph g;
    for (const auto& t : triples) g.insert(t);
    for (int i = 0; i < 7; ++i) {
      Term root = i < 6 ? iri(kPrefix + "n" + std::to_string(i)) : iri("http://other.org/x");
      auto framed = frameRoots(g, {root.value}, worldContext(), kPrefix);
      json expected = oracleFrame(triples, root);
      if (expected.is_null()) {
        EXPECT_TRUE(framed.empty());
        continue;
      }
      ++nonEmpty;
      ASSERT_EQ(framed.size(), 1u);
      ASSERT_EQ(toJson(framed[0]), expected) << "round " << round << "\n" << rdf::toNTriples(g);
      for (const auto& [name, stubs] : framed[0].links) {
        for (const auto& stub : stubs) EXPECT_TRUE(stub.isStub());
      }
    }
  }
  EXPECT_GT(nonEmpty, 500);
}

// _____________________________________________________________________________
TEST(EnvelopeToTriples, rules) {
  const auto& ctx = regionContext();
  auto texas = envelopeFromJson(json::parse(R"({"id": "Texas", "type": ["Region"],
      "label": ["Texas"]})"), ctx);
  auto triples = envelopeToTriples(texas, ctx, kPrefix);
  EXPECT_EQ(triples, (std::vector<Triple>{
                         {iri(kPrefix + "Texas"), rdfType(), iri(kRegions + "Region")},
                         {iri(kPrefix + "Texas"), rdfsLabel(), Term::literal("Texas")}}));

  auto linked = envelopeFromJson(json::parse(R"({"id": "Texas",
      "partOfRegion": [{"id": "USA", "label": ["USA"], "type": ["Region"]}]})"), ctx);
  EXPECT_EQ(envelopeToTriples(linked, ctx, kPrefix),
            (std::vector<Triple>{{iri(kPrefix + "Texas"), iri(kRegions + "partOfRegion"),
                                  iri(kPrefix + "USA")}}));

  try {
    envelopeFromJson(json::parse(R"({"id": "T", "colour": ["red"]})"), ctx);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "colour");
    EXPECT_THAT(e.what(), HasSubstr("colour"));
  }
  try {
    envelopeFromJson(json::parse(R"({"partOfRegion": [{"label": [3]}]})"), ctx);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "partOfRegion[0].label[0]");
  }
  auto noId = envelopeFromJson(json::parse(R"({"label": ["x"]})"), ctx);
  EXPECT_THROW(envelopeToTriples(noId, ctx, kPrefix), ValidationError);
  auto badType = envelopeFromJson(json::parse(R"({"id": "x", "type": ["Planet"]})"), ctx);
  EXPECT_THROW(envelopeToTriples(badType, ctx, kPrefix), ValidationError);
  auto badId = envelopeFromJson(json::parse(R"({"id": "a b>"})"), ctx);
  EXPECT_THROW(envelopeToTriples(badId, ctx, kPrefix), ValidationError);

  const auto& world = worldContext();
  auto wrongScalar = envelopeFromJson(json::parse(R"({"id": "c", "population": ["many"]})"), world);
  try {
    envelopeToTriples(wrongScalar, world, kPrefix);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "population[0]");
  }
  auto typed = envelopeFromJson(
      json::parse(R"({"id": "c", "population": [5], "area": [2], "isCapital": [true]})"), world);
  auto typedTriples = envelopeToTriples(typed, world, kPrefix);
  EXPECT_THAT(typedTriples, ::testing::Contains(Triple{iri(kPrefix + "c"),
                                                       iri(kWorld + "population"),
                                                       Term::literal("5", kXsd + "integer")}));
  EXPECT_THAT(typedTriples, ::testing::Contains(Triple{iri(kPrefix + "c"), iri(kWorld + "area"),
                                                       Term::literal("2", kXsd + "double")}));
}

// _____________________________________________________________________________
TEST(EnvelopeToTriples, framingRoundTrip) {
  std::mt19937 rng(23);
  const auto& ctx = worldContext();
  std::vector<std::string> typeChoices{"Region", "City", "Person", "Cat",
                                       "http://other.org/Thing"};
  auto word = [&] {
    std::string w;
    for (std::size_t n = 1 + rng() % 6; n > 0; --n) w += "aé\"b\\ \nZ"[rng() % 9];
    return w;
  };
  for (int round = 0; round < 200; ++round) {
    ResourceEnvelope e;
    e.id = rng() % 4 == 0 ? "http://other.org/r" + std::to_string(round)
                          : "r" + std::to_string(round);
    for (std::size_t n = rng() % 3; n > 0; --n) e.label.push_back(word());
    for (std::size_t n = 1 + rng() % 2; n > 0; --n) e.type.push_back(typeChoices[rng() % 5]);
    for (const auto* field : {"partOfRegion", "livesIn"}) {
      for (std::size_t n = rng() % 3; n > 0; --n) {
        e.links[field].push_back({.id = "s" + std::to_string(rng() % 5)});
      }
    }
    for (std::size_t n = rng() % 3; n > 0; --n) {
      e.values["population"].push_back(static_cast<long long>(rng() % 2000) - 1000);
    }
    for (std::size_t n = rng() % 2; n > 0; --n) {
      e.values["area"].push_back(static_cast<double>(rng() % 1000) / 8.0);
    }
    for (std::size_t n = rng() % 2; n > 0; --n) e.values["isCapital"].push_back(rng() % 2 == 1);
    for (std::size_t n = rng() % 2; n > 0; --n) e.values["name"].push_back(word());
    e.normalize();

    auto reparsed = envelopeFromJson(toJson(e), ctx);
    reparsed.normalize();
    ASSERT_EQ(reparsed, e);
    auto triples = envelopeToTriples(e, ctx, kPrefix);
    Graph g;
    for (const auto& t : triples) g.insert(t);
    auto framed = frameRoots(g, {decodeId(*e.id, kPrefix)}, ctx, kPrefix);
    ASSERT_EQ(framed.size(), 1u);
    ASSERT_EQ(framed[0], e) << toJson(e).dump();
  }
}

// _____________________________________________________________________________
TEST(ValidateResource, pathsAndRules) {
  auto model = loadFixture("world.ttl");
  auto spec = compiler::compileSpec(model, {});
  const auto& city = spec.schemas.at("City");
  auto check = [&](const char* text, bool requireIds) {
    return compiler::validateResource(json::parse(text), city, spec.schemas, requireIds);
  };
  EXPECT_TRUE(check(R"({"label": ["Sevilla"], "population": [1], "area": [1.5, 2],
      "isCapital": [false], "foundedOn": ["2001-01-01T00:00:00Z"], "partOfRegion": null})",
                    false)
                  .empty());
  auto issues = check(R"({"bogus": 1, "population": ["x"],
      "partOfRegion": [{"label": ["Spain"], "colour": []}], "foundedOn": ["yesterday"]})",
                      false);
  std::vector<std::string> paths;
  for (const auto& i : issues) paths.push_back(i.path);
  EXPECT_THAT(paths, ::testing::UnorderedElementsAre("bogus", "population[0]",
                                                     "partOfRegion[0].colour", "foundedOn[0]"));
  auto missing = check(R"({"partOfRegion": [{"label": ["Spain"]}]})", true);
  ASSERT_EQ(missing.size(), 2u);
  EXPECT_EQ(missing[1].path, "partOfRegion[0].id");
  EXPECT_FALSE(check(R"({"id": null})", false).empty());
  EXPECT_FALSE(check(R"({"label": "x"})", false).empty());
  EXPECT_FALSE(check(R"([])", false).empty());
  EXPECT_THROW(compiler::requireValid(json::parse(R"({"bogus": 1})"), city, spec.schemas, false),
               compiler::ValidationError);
}
