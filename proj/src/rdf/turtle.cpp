#include "ontoapi/rdf/turtle.h"

#include <atomic>
#include <optional>

#include "ontoapi/rdf/vocab.h"

namespace ontoapi::rdf {

// ____________________________________________________________________________
std::string freshBlankScope() {
  static std::atomic<unsigned long> counter{0};
  return "d" + std::to_string(counter.fetch_add(1)) + "_";
}

// ____________________________________________________________________________
std::string resolveIri(std::string_view base, std::string_view ref) {
  auto schemeEnd = ref.find(':');
  if (schemeEnd != std::string_view::npos) {
    auto scheme = ref.substr(0, schemeEnd);
    bool isScheme = !scheme.empty() &&
                    scheme.find_first_of("/?#") == std::string_view::npos;
    if (isScheme) return std::string(ref);
  }
  if (base.empty()) return std::string(ref);
  if (ref.empty()) {
    return std::string(base.substr(0, base.find('#')));
  }
  if (ref.front() == '#') {
    return std::string(base.substr(0, base.find('#'))) + std::string(ref);
  }
  auto authorityStart = base.find("//");
  std::size_t pathStart =
      authorityStart == std::string_view::npos
          ? base.find(':') + 1
          : base.find('/', authorityStart + 2);
  if (pathStart == std::string_view::npos) pathStart = base.size();
  if (ref.starts_with("//")) {
    return std::string(base.substr(0, base.find(':') + 1)) + std::string(ref);
  }
  if (ref.front() == '/') {
    return std::string(base.substr(0, pathStart)) + std::string(ref);
  }
  auto withoutQuery = base.substr(0, base.find_first_of("?#"));
  auto lastSlash = withoutQuery.rfind('/');
  if (lastSlash == std::string_view::npos || lastSlash < pathStart) {
    return std::string(withoutQuery.substr(0, pathStart)) + "/" +
           std::string(ref);
  }
  return std::string(withoutQuery.substr(0, lastSlash + 1)) + std::string(ref);
}

namespace {

class TurtleReader {
 public:
  TurtleReader(std::string_view text, std::string_view base)
      : lexer_(text, Lexer::Options{.signedNumbers = true}),
        base_(base),
        blankScope_(freshBlankScope()) {}

  RdfDocument read() {
    while (lexer_.peek().type != TokenType::End) statement();
    return std::move(doc_);
  }

 private:
  [[noreturn]] void fail(const std::string& message) {
    throw SyntaxError(message, lexer_.peek().line);
  }

  void expectPunct(std::string_view p) {
    if (!lexer_.peek().isPunct(p)) {
      fail("expected '" + std::string(p) + "' but found '" +
           lexer_.peek().text + "'");
    }
    lexer_.next();
  }

  Graph& target() {
    if (!graphName_) return doc_.dataset.defaultGraph;
    return doc_.dataset.namedGraphs[*graphName_];
  }

  void emit(Term s, Term p, Term o) {
    target().insert(Triple{std::move(s), std::move(p), std::move(o)});
  }

  void statement() {
    const Token& tok = lexer_.peek();
    if (tok.type == TokenType::Word) {
      if (tok.text == "@prefix" || tok.isKeyword("PREFIX")) {
        bool turtleStyle = tok.text == "@prefix";
        lexer_.next();
        Token name = lexer_.next();
        if (name.type != TokenType::PrefixedName || !name.text.empty()) {
          throw SyntaxError("expected prefix name", name.line);
        }
        Token iri = lexer_.next();
        if (iri.type != TokenType::IriRef) {
          throw SyntaxError("expected IRI in prefix declaration", iri.line);
        }
        doc_.prefixes[name.prefix] = resolveIri(base_, iri.text);
        if (turtleStyle) expectPunct(".");
        return;
      }
      if (tok.text == "@base" || tok.isKeyword("BASE")) {
        bool turtleStyle = tok.text == "@base";
        lexer_.next();
        Token iri = lexer_.next();
        if (iri.type != TokenType::IriRef) {
          throw SyntaxError("expected IRI in base declaration", iri.line);
        }
        base_ = resolveIri(base_, iri.text);
        if (turtleStyle) expectPunct(".");
        return;
      }
      if (tok.isKeyword("GRAPH")) {
        lexer_.next();
        Term name = iriOrBlankToken(lexer_.next());
        graphBlock(name.value);
        return;
      }
    }
    if (tok.isPunct("{")) {
      graphBlock(std::nullopt);
      return;
    }
    if ((tok.type == TokenType::IriRef ||
         tok.type == TokenType::PrefixedName) &&
        lexer_.peekSecond().isPunct("{")) {
      Term name = iriOrBlankToken(lexer_.next());
      graphBlock(name.value);
      return;
    }
    triples();
    expectPunct(".");
  }

  void graphBlock(std::optional<std::string> name) {
    if (graphName_) fail("nested graph blocks are not allowed");
    expectPunct("{");
    graphName_ = std::move(name);
    while (!lexer_.peek().isPunct("}")) {
      if (lexer_.peek().type == TokenType::End) fail("unterminated graph block");
      triples();
      if (lexer_.peek().isPunct(".")) {
        lexer_.next();
      } else if (!lexer_.peek().isPunct("}")) {
        fail("expected '.' or '}' in graph block");
      }
    }
    lexer_.next();
    graphName_.reset();
  }

  void triples() {
    if (lexer_.peek().isPunct("[")) {
      Term subject = blankNodePropertyList();
      if (!lexer_.peek().isPunct(".") && !lexer_.peek().isPunct("}")) {
        predicateObjectList(subject);
      }
      return;
    }
    Term subject = subjectTerm();
    predicateObjectList(subject);
  }

  Term subjectTerm() {
    if (lexer_.peek().isPunct("(")) return collection();
    Token tok = lexer_.next();
    return iriOrBlankToken(tok);
  }

  Term iriOrBlankToken(const Token& tok) {
    switch (tok.type) {
      case TokenType::IriRef:
        return Term::iri(resolveIri(base_, tok.text));
      case TokenType::PrefixedName:
        return Term::iri(expandPrefixed(tok));
      case TokenType::BlankLabel:
        return Term::blank(blankScope_ + tok.text);
      default:
        throw SyntaxError("expected IRI or blank node, found '" + tok.text + "'",
                          tok.line);
    }
  }

  std::string expandPrefixed(const Token& tok) {
    auto it = doc_.prefixes.find(tok.prefix);
    if (it == doc_.prefixes.end()) {
      throw SyntaxError("undeclared prefix '" + tok.prefix + ":'", tok.line);
    }
    return it->second + tok.text;
  }

  void predicateObjectList(const Term& subject) {
    while (true) {
      Term predicate = verb();
      objectList(subject, predicate);
      if (!lexer_.peek().isPunct(";")) return;
      while (lexer_.peek().isPunct(";")) lexer_.next();
      const Token& after = lexer_.peek();
      if (after.isPunct(".") || after.isPunct("]") || after.isPunct("}") ||
          after.type == TokenType::End) {
        return;
      }
    }
  }

  Term verb() {
    Token tok = lexer_.next();
    if (tok.type == TokenType::Word && tok.text == "a") {
      return Term::iri(std::string(vocab::kRdfType));
    }
    if (tok.type == TokenType::IriRef) return Term::iri(resolveIri(base_, tok.text));
    if (tok.type == TokenType::PrefixedName) return Term::iri(expandPrefixed(tok));
    throw SyntaxError("expected predicate, found '" + tok.text + "'", tok.line);
  }

  void objectList(const Term& subject, const Term& predicate) {
    emit(subject, predicate, object());
    while (lexer_.peek().isPunct(",")) {
      lexer_.next();
      emit(subject, predicate, object());
    }
  }

  Term freshBlank() {
    return Term::blank(blankScope_ + "anon" + std::to_string(anonCounter_++));
  }

  Term blankNodePropertyList() {
    expectPunct("[");
    Term node = freshBlank();
    if (!lexer_.peek().isPunct("]")) predicateObjectList(node);
    expectPunct("]");
    return node;
  }

  Term collection() {
    expectPunct("(");
    std::vector<Term> items;
    while (!lexer_.peek().isPunct(")")) {
      if (lexer_.peek().type == TokenType::End) fail("unterminated collection");
      items.push_back(object());
    }
    lexer_.next();
    Term head = Term::iri(std::string(vocab::kRdfNil));
    for (auto it = items.rbegin(); it != items.rend(); ++it) {
      Term cell = freshBlank();
      emit(cell, Term::iri(std::string(vocab::kRdfFirst)), *it);
      emit(cell, Term::iri(std::string(vocab::kRdfRest)), head);
      head = cell;
    }
    return head;
  }

  Term object() {
    const Token& tok = lexer_.peek();
    if (tok.isPunct("[")) return blankNodePropertyList();
    if (tok.isPunct("(")) return collection();
    Token t = lexer_.next();
    switch (t.type) {
      case TokenType::IriRef:
      case TokenType::PrefixedName:
      case TokenType::BlankLabel:
        return iriOrBlankToken(t);
      case TokenType::String: {
        if (lexer_.peek().type == TokenType::LangTag) {
          return Term::langLiteral(std::move(t.text), lexer_.next().text);
        }
        if (lexer_.peek().isPunct("^^")) {
          lexer_.next();
          Token dt = lexer_.next();
          if (dt.type != TokenType::IriRef && dt.type != TokenType::PrefixedName) {
            throw SyntaxError("expected datatype IRI", dt.line);
          }
          return Term::literal(std::move(t.text), iriOrBlankToken(dt).value);
        }
        return Term::literal(std::move(t.text));
      }
      case TokenType::Integer:
        return Term::literal(std::move(t.text), vocab::kXsdInteger);
      case TokenType::Decimal:
        return Term::literal(std::move(t.text), vocab::kXsdDecimal);
      case TokenType::Double:
        return Term::literal(std::move(t.text), vocab::kXsdDouble);
      case TokenType::Word:
        if (t.text == "true" || t.text == "false") {
          return Term::literal(std::move(t.text), vocab::kXsdBoolean);
        }
        [[fallthrough]];
      default:
        throw SyntaxError("unexpected token '" + t.text + "' in object position",
                          t.line);
    }
  }

  Lexer lexer_;
  std::string base_;
  std::string blankScope_;
  RdfDocument doc_;
  std::optional<std::string> graphName_;
  unsigned long anonCounter_ = 0;
};

}  // namespace

// ____________________________________________________________________________
RdfDocument parseTurtle(std::string_view text, std::string_view baseIri) {
  return TurtleReader(text, baseIri).read();
}

}  // namespace ontoapi::rdf
