#include <gmock/gmock.h>

#include "ontoapi/rdf/turtle.h"
#include "ontoapi/rdf/vocab.h"
#include "ontoapi/sparql/engine.h"
#include "ontoapi/sparql/parser.h"

using namespace ontoapi;
using namespace ontoapi::sparql;
using rdf::Term;
using rdf::Triple;
using ::testing::ElementsAre;

namespace {

constexpr const char* kData = R"(
@prefix : <http://ex.org/> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
:texas a :Region ; rdfs:label "Texas"@en ; :partOf :usa ; :population 29000000 .
:usa a :Region ; rdfs:label "USA" ; :population 331000000 .
:europe a :Region ; rdfs:label "Europe" .
:egypt a :Region ; rdfs:label "Egypt" ; :area 1.01e6 .
:rex a :Dog .
GRAPH <http://ex.org/g/alice> { :a1 a :Region ; rdfs:label "Alice land" . }
GRAPH <http://ex.org/g/bob> { :b1 a :Region ; rdfs:label "Bob land" . :texas rdfs:label "Tejas"@es . }
)";

Store makeStore() { return Store(rdf::parseTurtle(kData).dataset); }

const std::string kPrefixes =
    "PREFIX : <http://ex.org/>\n"
    "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n"
    "PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n";

std::vector<std::string> column(const QueryResult& r, const std::string& var) {
  std::vector<std::string> out;
  for (const auto& row : r.select.rows) {
    auto it = row.find(var);
    out.push_back(it == row.end() ? "UNBOUND" : it->second.value);
  }
  return out;
}

Term ex(const std::string& local) { return Term::iri("http://ex.org/" + local); }

}  // namespace

// _____________________________________________________________________________
TEST(SparqlQuery, basicPatternOrderAndSlice) {
  auto store = makeStore();
  auto r = store.query(kPrefixes +
                       "SELECT ?r WHERE { ?r a :Region } ORDER BY ASC(STR(?r)) "
                       "LIMIT 2 OFFSET 1");
  EXPECT_THAT(column(r, "r"), ElementsAre("http://ex.org/b1", "http://ex.org/egypt"));
  r = store.query(kPrefixes + "SELECT ?r WHERE { ?r a :Region } ORDER BY DESC(?r) LIMIT 1");
  EXPECT_THAT(column(r, "r"), ElementsAre("http://ex.org/usa"));
}

// _____________________________________________________________________________
TEST(SparqlQuery, optionalUnionFilter) {
  auto store = makeStore();
  auto r = store.query(kPrefixes +
                       "SELECT ?r ?p WHERE { ?r a :Region . OPTIONAL { ?r :population ?p } "
                       "FILTER(!BOUND(?p) || ?p > 100000000) } ORDER BY ?r");
  EXPECT_THAT(column(r, "r"),
              ElementsAre("http://ex.org/a1", "http://ex.org/b1", "http://ex.org/egypt",
                          "http://ex.org/europe", "http://ex.org/usa"));
  r = store.query(kPrefixes +
                  "SELECT ?x WHERE { { ?x a :Dog } UNION { ?x :area ?a } } ORDER BY ?x");
  EXPECT_THAT(column(r, "x"), ElementsAre("http://ex.org/egypt", "http://ex.org/rex"));
  r = store.query(kPrefixes +
                  "SELECT DISTINCT ?r WHERE { ?r rdfs:label ?l "
                  "FILTER(CONTAINS(LCASE(STR(?l)), \"eu\") && LANG(?l) = \"\") }");
  EXPECT_THAT(column(r, "r"), ElementsAre("http://ex.org/europe"));
  r = store.query(kPrefixes +
                  "SELECT ?r WHERE { ?r rdfs:label ?l FILTER(LANGMATCHES(LANG(?l), \"en\")) }");
  EXPECT_THAT(column(r, "r"), ElementsAre("http://ex.org/texas"));
  r = store.query(kPrefixes +
                  "SELECT ?r WHERE { ?r a :Region FILTER NOT EXISTS { ?r rdfs:label ?l "
                  "FILTER(REGEX(?l, \"^e\", \"i\")) } MINUS { ?r :population ?p } } ORDER BY ?r");
  EXPECT_THAT(column(r, "r"), ElementsAre("http://ex.org/a1", "http://ex.org/b1"));
}

// _____________________________________________________________________________
TEST(SparqlQuery, expressionsAndBind) {
  auto store = makeStore();
  auto r = store.query(kPrefixes +
                       "SELECT ?v ?s WHERE { BIND(1 + 2 * 3 AS ?v) "
                       "BIND(CONCAT(\"a\", STR(:x), UCASE(\"b\")) AS ?s) }");
  ASSERT_EQ(r.select.rows.size(), 1u);
  EXPECT_EQ(r.select.rows[0].at("v"), Term::literal("7", vocab::kXsdInteger));
  EXPECT_EQ(r.select.rows[0].at("s").value, "ahttp://ex.org/xB");
  r = store.query(kPrefixes +
                  "SELECT ?x WHERE { VALUES ?x { 1 2.5 \"3\" } FILTER(isNUMERIC(?x) && ?x >= 2) }");
  EXPECT_THAT(column(r, "x"), ElementsAre("2.5"));
  r = store.query(kPrefixes +
                  "SELECT (STRLEN(\"h\\u00e9llo\") AS ?n) (SUBSTR(\"hello\", 2, 3) AS ?sub) "
                  "(xsd:integer(\"42\") + 1 AS ?c) (IF(?unbound, 1, 2) AS ?i) "
                  "(COALESCE(?unbound, \"d\") AS ?d) (4 / 2 AS ?q) WHERE {}");
  ASSERT_EQ(r.select.rows.size(), 1u);
  const auto& row = r.select.rows[0];
  EXPECT_EQ(row.at("n").value, "5");
  EXPECT_EQ(row.at("sub").value, "ell");
  EXPECT_EQ(row.at("c").value, "43");
  EXPECT_FALSE(row.contains("i"));
  EXPECT_EQ(row.at("d").value, "d");
  EXPECT_EQ(row.at("q"), Term::literal("2.0", vocab::kXsdDecimal));
  r = store.query(kPrefixes + "ASK { :texas :partOf :usa }");
  EXPECT_TRUE(r.boolean);
  r = store.query(kPrefixes + "ASK { :usa :partOf :texas }");
  EXPECT_FALSE(r.boolean);
  r = store.query(kPrefixes + "SELECT ?x WHERE { ?x a ?t FILTER(?t IN (:Dog, :Cat)) }");
  EXPECT_THAT(column(r, "x"), ElementsAre("http://ex.org/rex"));
}

// _____________________________________________________________________________
TEST(SparqlQuery, subselectAndConstruct) {
  auto store = makeStore();
  auto r = store.query(kPrefixes +
                       "CONSTRUCT { _:p :member ?r . ?r rdfs:label ?l } WHERE { "
                       "{ SELECT DISTINCT ?r WHERE { ?r a :Region } ORDER BY ?r LIMIT 2 } "
                       "?r rdfs:label ?l }");
  EXPECT_EQ(r.form, QueryForm::Construct);
  auto members = r.graph.match(std::nullopt, ex("member"), std::nullopt);
  ASSERT_EQ(members.size(), 2u);
  EXPECT_NE(members[0].subject, members[1].subject);
  EXPECT_EQ(r.graph.objects(ex("a1"), Term::iri(std::string(vocab::kRdfsLabel))).size(), 1u);
  r = store.query(kPrefixes + "CONSTRUCT WHERE { :usa ?p ?o }");
  EXPECT_EQ(r.graph.size(), 3u);
}

// _____________________________________________________________________________
TEST(SparqlQuery, datasetSelection) {
  auto store = makeStore();
  auto q = kPrefixes + "SELECT ?r WHERE { ?r a :Region } ORDER BY ?r";
  EXPECT_EQ(column(store.query(q), "r").size(), 6u);
  auto alice = store.query(q, {.defaultGraphs = {"http://ex.org/g/alice"}});
  EXPECT_THAT(column(alice, "r"), ElementsAre("http://ex.org/a1"));
  auto none = store.query(q, {.defaultGraphs = {"http://ex.org/g/nobody"}});
  EXPECT_TRUE(none.select.rows.empty());
  auto graphs = store.query(kPrefixes + "SELECT ?g ?r WHERE { GRAPH ?g { ?r a :Region } } ORDER BY ?g");
  EXPECT_THAT(column(graphs, "g"),
              ElementsAre("http://ex.org/g/alice", "http://ex.org/g/bob"));
  auto from = store.query(kPrefixes +
                          "SELECT ?r FROM <http://ex.org/g/bob> WHERE { ?r a :Region }");
  EXPECT_THAT(column(from, "r"), ElementsAre("http://ex.org/b1"));
  // Triples present in several graphs are not duplicated in the union.
  store.update(kPrefixes + "INSERT DATA { GRAPH <http://ex.org/g/bob> { :usa a :Region } }");
  EXPECT_EQ(column(store.query(q), "r").size(), 6u);
}

// _____________________________________________________________________________
TEST(SparqlUpdate, insertDeleteAndModify) {
  auto store = makeStore();
  store.update(kPrefixes +
               "INSERT DATA { GRAPH <http://ex.org/g/carol> { :c1 a :Region ; rdfs:label \"C\" } } ;\n"
               "DELETE DATA { :rex a :Dog }");
  auto sizes = store.graphSizes();
  EXPECT_EQ(sizes.at("http://ex.org/g/carol"), 2u);
  store.update(kPrefixes + "DELETE WHERE { GRAPH <http://ex.org/g/carol> { :c1 ?p ?o } }");
  EXPECT_FALSE(store.graphSizes().contains("http://ex.org/g/carol"));

  store.update(kPrefixes +
               "DELETE { ?r rdfs:label ?l } INSERT { ?r rdfs:label ?u } "
               "WHERE { ?r :population ?p ; rdfs:label ?l BIND(UCASE(STR(?l)) AS ?u) }");
  auto r = store.query(kPrefixes + "SELECT ?l WHERE { :usa rdfs:label ?l }");
  EXPECT_THAT(column(r, "l"), ElementsAre("USA"));
  r = store.query(kPrefixes + "SELECT ?l WHERE { :texas rdfs:label ?l }", {.defaultGraphs = {}});
  EXPECT_THAT(column(r, "l"), testing::UnorderedElementsAre("TEXAS", "Tejas"));

  store.update(kPrefixes +
               "WITH <http://ex.org/g/alice> DELETE { ?s ?p ?o } WHERE { ?s ?p ?o }");
  EXPECT_FALSE(store.graphSizes().contains("http://ex.org/g/alice"));
  store.update("CLEAR ALL");
  EXPECT_EQ(store.graphSizes(), (std::map<std::string, std::size_t>{{"", 0}}));
}

// _____________________________________________________________________________
TEST(SparqlUpdate, failedRequestLeavesStoreUnchanged) {
  auto store = makeStore();
  auto before = store.snapshot();
  EXPECT_THROW(store.update(kPrefixes + "INSERT DATA { :x a :Y } ; DELETE DATA { ?v a :Y }"),
               rdf::SyntaxError);
  EXPECT_EQ(store.snapshot().namedGraphs, before.namedGraphs);
  EXPECT_EQ(store.snapshot().defaultGraph, before.defaultGraph);
}

// _____________________________________________________________________________
TEST(SparqlParser, errorsAndUnsupported) {
  EXPECT_THROW(parseQuery("SELECT ?x WHERE { ?x ?p }"), rdf::SyntaxError);
  EXPECT_THROW(parseQuery("SELECT ?x WHERE { ?x foo:bar ?y }"), rdf::SyntaxError);
  EXPECT_THROW(parseQuery("PREFIX : <http://x/> SELECT ?x WHERE { ?x :p/:q ?y }"),
               rdf::SyntaxError);
  EXPECT_THROW(parseQuery("SELECT (COUNT(*) AS ?n) WHERE { ?x ?p ?y }"), rdf::SyntaxError);
  EXPECT_THROW(parseQuery("DESCRIBE <http://x>"), rdf::SyntaxError);
  EXPECT_THROW(parseUpdate("INSERT DATA { <http://x> <http://p> ?o }"), rdf::SyntaxError);
  try {
    parseQuery("SELECT ?x\nWHERE {\n ?x <http://p> \n}");
    FAIL();
  } catch (const rdf::SyntaxError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  auto q = parseQuery("PREFIX : <http://x/> SELECT * WHERE { [] :p [ :q 1 ] ; :r -2 . }");
  ASSERT_EQ(q.where.elements.size(), 1u);
  EXPECT_EQ(q.where.elements[0].triples.size(), 3u);
  EXPECT_EQ(q.where.elements[0].triples[2].object.term.value, "-2");
}

// _____________________________________________________________________________
TEST(SparqlResults, jsonFormat) {
  auto store = makeStore();
  auto r = store.query(kPrefixes + "SELECT ?l WHERE { :texas rdfs:label ?l } ORDER BY ?l");
  auto j = toResultsJson(r);
  EXPECT_EQ(j["head"]["vars"], nlohmann::json::array({"l"}));
  EXPECT_EQ(j["results"]["bindings"][0]["l"]["xml:lang"], "es");
  EXPECT_EQ(toResultsJson(store.query("ASK {}"))["boolean"], true);
}
