#include "ontoapi/sparql/parser.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>

#include "ontoapi/rdf/turtle.h"
#include "ontoapi/rdf/vocab.h"

namespace ontoapi::sparql {

using rdf::Lexer;
using rdf::SyntaxError;
using rdf::Term;
using rdf::Token;
using rdf::TokenType;

namespace {

// Blank nodes in WHERE clauses act as variables with this name prefix.
constexpr std::string_view kBlankVarPrefix = "@b:";

const std::set<std::string, std::less<>> kBuiltins = {
    "STR", "LANG", "LANGMATCHES", "DATATYPE", "BOUND", "IRI", "URI",
    "ISIRI", "ISURI", "ISBLANK", "ISLITERAL", "ISNUMERIC", "REGEX",
    "CONTAINS", "STRSTARTS", "STRENDS", "STRBEFORE", "STRAFTER", "LCASE",
    "UCASE", "STRLEN", "SUBSTR", "CONCAT", "COALESCE", "IF", "SAMETERM",
    "STRDT", "STRLANG", "ABS", "CEIL", "FLOOR", "ROUND", "REPLACE"};

const std::set<std::string, std::less<>> kAggregates = {
    "COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE", "GROUP_CONCAT"};

std::string upper(std::string_view s) {
  std::string out(s);
  std::ranges::transform(out, out.begin(),
                         [](unsigned char c) { return std::toupper(c); });
  return out;
}

ExprPtr makeExpr(Expr::Op op, std::vector<ExprPtr> args = {}) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->args = std::move(args);
  return e;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) {}

  Query query() {
    prologue();
    Query q = queryBody();
    expectEnd();
    return q;
  }

  std::vector<UpdateOp> update() {
    std::vector<UpdateOp> ops;
    prologue();
    while (lexer_.peek().type != TokenType::End) {
      ops.push_back(updateOp());
      if (!lexer_.peek().isPunct(";")) break;
      lexer_.next();
      prologue();
    }
    expectEnd();
    return ops;
  }

 private:
  enum class BlankMode { AsVariable, AsTerm };

  [[noreturn]] void fail(const std::string& message) {
    throw SyntaxError(message, lexer_.peek().line);
  }

  std::string describe(const Token& t) {
    if (t.type == TokenType::End) return "end of input";
    return "'" + t.text + "'";
  }

  void expectPunct(std::string_view p) {
    if (!lexer_.peek().isPunct(p)) {
      fail("expected '" + std::string(p) + "' but found " + describe(lexer_.peek()));
    }
    lexer_.next();
  }

  void expectKeyword(std::string_view k) {
    if (!lexer_.peek().isKeyword(k)) {
      fail("expected " + std::string(k) + " but found " + describe(lexer_.peek()));
    }
    lexer_.next();
  }

  bool acceptKeyword(std::string_view k) {
    if (!lexer_.peek().isKeyword(k)) return false;
    lexer_.next();
    return true;
  }

  bool acceptPunct(std::string_view p) {
    if (!lexer_.peek().isPunct(p)) return false;
    lexer_.next();
    return true;
  }

  void expectEnd() {
    if (lexer_.peek().type != TokenType::End) {
      fail("unexpected " + describe(lexer_.peek()));
    }
  }

  void prologue() {
    while (true) {
      if (acceptKeyword("PREFIX")) {
        Token name = lexer_.next();
        if (name.type != TokenType::PrefixedName || !name.text.empty()) {
          fail("expected prefix name");
        }
        prefixes_[name.prefix] = iriRef();
      } else if (acceptKeyword("BASE")) {
        base_ = iriRef();
      } else {
        return;
      }
    }
  }

  std::string iriRef() {
    Token t = lexer_.next();
    if (t.type != TokenType::IriRef) fail("expected IRI");
    return base_.empty() ? t.text : rdf::resolveIri(base_, t.text);
  }

  std::string expandPrefixed(const Token& t) {
    auto it = prefixes_.find(t.prefix);
    if (it == prefixes_.end()) {
      throw SyntaxError("undefined prefix '" + t.prefix + ":'", t.line);
    }
    return it->second + t.text;
  }

  bool peekIri() {
    auto type = lexer_.peek().type;
    return type == TokenType::IriRef || type == TokenType::PrefixedName;
  }

  std::string iri() {
    Token t = lexer_.next();
    if (t.type == TokenType::IriRef) {
      return base_.empty() ? t.text : rdf::resolveIri(base_, t.text);
    }
    if (t.type == TokenType::PrefixedName) return expandPrefixed(t);
    throw SyntaxError("expected IRI but found " + describe(t), t.line);
  }

  // ---------------------------------------------------------------- queries

  Query queryBody() {
    Query q;
    if (acceptKeyword("SELECT")) {
      q.form = QueryForm::Select;
      selectClause(q);
      datasetClauses(q);
      acceptKeyword("WHERE");
      q.where = groupPattern();
    } else if (acceptKeyword("CONSTRUCT")) {
      q.form = QueryForm::Construct;
      if (lexer_.peek().isPunct("{")) {
        q.constructTemplate = quadFreeTemplate();
        datasetClauses(q);
        acceptKeyword("WHERE");
        q.where = groupPattern();
      } else {
        datasetClauses(q);
        expectKeyword("WHERE");
        // Short form: the pattern doubles as the template.
        expectPunct("{");
        auto triples = triplesUntil("}", BlankMode::AsVariable);
        expectPunct("}");
        q.constructTemplate = triples;
        q.where.elements.push_back(Element{.kind = Element::Kind::Triples,
                                           .triples = std::move(triples)});
      }
    } else if (acceptKeyword("ASK")) {
      q.form = QueryForm::Ask;
      datasetClauses(q);
      acceptKeyword("WHERE");
      q.where = groupPattern();
    } else if (lexer_.peek().isKeyword("DESCRIBE")) {
      fail("DESCRIBE queries are not supported");
    } else {
      fail("expected SELECT, CONSTRUCT or ASK but found " + describe(lexer_.peek()));
    }
    solutionModifiers(q);
    return q;
  }

  void selectClause(Query& q) {
    if (acceptKeyword("DISTINCT")) {
      q.distinct = true;
    } else if (acceptKeyword("REDUCED")) {
      q.distinct = true;
    }
    if (acceptPunct("*")) {
      q.selectAll = true;
      return;
    }
    while (true) {
      const auto& t = lexer_.peek();
      if (t.type == TokenType::Variable) {
        q.projection.push_back({lexer_.next().text, nullptr});
      } else if (t.isPunct("(")) {
        lexer_.next();
        auto e = expression();
        expectKeyword("AS");
        Token v = lexer_.next();
        if (v.type != TokenType::Variable) fail("expected variable after AS");
        expectPunct(")");
        q.projection.push_back({v.text, e});
      } else {
        break;
      }
    }
    if (q.projection.empty()) fail("empty SELECT clause");
  }

  void datasetClauses(Query& q) {
    while (acceptKeyword("FROM")) {
      if (acceptKeyword("NAMED")) {
        q.fromNamed.push_back(iri());
      } else {
        q.from.push_back(iri());
      }
    }
  }

  void solutionModifiers(Query& q) {
    if (lexer_.peek().isKeyword("GROUP") || lexer_.peek().isKeyword("HAVING")) {
      fail("GROUP BY and HAVING are not supported");
    }
    if (acceptKeyword("ORDER")) {
      expectKeyword("BY");
      while (true) {
        const auto& t = lexer_.peek();
        if (t.isKeyword("ASC") || t.isKeyword("DESC")) {
          bool desc = lexer_.next().isKeyword("DESC");
          q.orderBy.push_back({bracketted(), desc});
        } else if (t.type == TokenType::Variable) {
          auto e = makeExpr(Expr::Op::Var);
          std::const_pointer_cast<Expr>(e)->name = lexer_.next().text;
          q.orderBy.push_back({e, false});
        } else if (t.isPunct("(")) {
          q.orderBy.push_back({bracketted(), false});
        } else if (t.type == TokenType::Word && kBuiltins.contains(upper(t.text))) {
          q.orderBy.push_back({primary(), false});
        } else {
          break;
        }
      }
      if (q.orderBy.empty()) fail("empty ORDER BY");
    }
    for (int i = 0; i < 2; ++i) {
      if (acceptKeyword("LIMIT")) {
        q.limit = integer();
      } else if (acceptKeyword("OFFSET")) {
        q.offset = integer();
      }
    }
    if (lexer_.peek().isKeyword("VALUES")) fail("trailing VALUES is not supported");
  }

  long long integer() {
    Token t = lexer_.next();
    if (t.type != TokenType::Integer) {
      throw SyntaxError("expected integer but found " + describe(t), t.line);
    }
    try {
      return std::stoll(t.text);
    } catch (const std::exception&) {
      throw SyntaxError("integer out of range", t.line);
    }
  }

  std::vector<TriplePattern> quadFreeTemplate() {
    expectPunct("{");
    auto triples = triplesUntil("}", BlankMode::AsTerm);
    expectPunct("}");
    return triples;
  }

  GroupPattern groupPattern() {
    expectPunct("{");
    GroupPattern group;
    if (lexer_.peek().isKeyword("SELECT")) {
      auto sub = std::make_shared<Query>();
      sub->form = QueryForm::Select;
      lexer_.next();
      selectClause(*sub);
      acceptKeyword("WHERE");
      sub->where = groupPattern();
      solutionModifiers(*sub);
      expectPunct("}");
      group.elements.push_back(
          Element{.kind = Element::Kind::SubQuery, .subquery = std::move(sub)});
      return group;
    }
    while (!lexer_.peek().isPunct("}")) {
      const auto& t = lexer_.peek();
      if (t.type == TokenType::End) fail("unterminated group pattern");
      if (t.isPunct(".")) {
        lexer_.next();
      } else if (t.isPunct("{")) {
        std::vector<GroupPattern> branches{groupPattern()};
        while (acceptKeyword("UNION")) branches.push_back(groupPattern());
        Element e{.kind = branches.size() == 1 ? Element::Kind::Group
                                               : Element::Kind::Union};
        e.groups = std::move(branches);
        group.elements.push_back(std::move(e));
      } else if (acceptKeyword("OPTIONAL")) {
        group.elements.push_back(
            Element{.kind = Element::Kind::Optional, .groups = {groupPattern()}});
      } else if (acceptKeyword("MINUS")) {
        group.elements.push_back(
            Element{.kind = Element::Kind::Minus, .groups = {groupPattern()}});
      } else if (acceptKeyword("GRAPH")) {
        Node g = varOrIri();
        group.elements.push_back(Element{
            .kind = Element::Kind::Graph, .groups = {groupPattern()}, .graph = g});
      } else if (acceptKeyword("FILTER")) {
        group.elements.push_back(
            Element{.kind = Element::Kind::Filter, .expr = constraint()});
      } else if (acceptKeyword("BIND")) {
        expectPunct("(");
        auto e = expression();
        expectKeyword("AS");
        Token v = lexer_.next();
        if (v.type != TokenType::Variable) fail("expected variable after AS");
        expectPunct(")");
        group.elements.push_back(
            Element{.kind = Element::Kind::Bind, .expr = e, .var = v.text});
      } else if (acceptKeyword("VALUES")) {
        group.elements.push_back(
            Element{.kind = Element::Kind::Values, .values = valuesBlock()});
      } else if (acceptKeyword("SERVICE")) {
        fail("SERVICE is not supported");
      } else {
        auto triples = triplesBlock(BlankMode::AsVariable);
        if (!group.elements.empty() &&
            group.elements.back().kind == Element::Kind::Triples) {
          auto& last = group.elements.back().triples;
          last.insert(last.end(), triples.begin(), triples.end());
        } else {
          group.elements.push_back(
              Element{.kind = Element::Kind::Triples, .triples = std::move(triples)});
        }
      }
    }
    expectPunct("}");
    return group;
  }

  ValuesBlock valuesBlock() {
    ValuesBlock block;
    if (lexer_.peek().type == TokenType::Variable) {
      block.vars.push_back(lexer_.next().text);
      expectPunct("{");
      while (!acceptPunct("}")) block.rows.push_back({dataValue()});
      return block;
    }
    expectPunct("(");
    while (!acceptPunct(")")) {
      Token v = lexer_.next();
      if (v.type != TokenType::Variable) fail("expected variable in VALUES");
      block.vars.push_back(v.text);
    }
    expectPunct("{");
    while (!acceptPunct("}")) {
      expectPunct("(");
      std::vector<std::optional<Term>> row;
      while (!acceptPunct(")")) row.push_back(dataValue());
      if (row.size() != block.vars.size()) fail("VALUES row has wrong arity");
      block.rows.push_back(std::move(row));
    }
    return block;
  }

  std::optional<Term> dataValue() {
    if (acceptKeyword("UNDEF")) return std::nullopt;
    Node n = term(BlankMode::AsTerm, false);
    return n.term;
  }

  Node varOrIri() {
    if (lexer_.peek().type == TokenType::Variable) {
      return Node::variable(lexer_.next().text);
    }
    return Node::fixed(Term::iri(iri()));
  }

  // Triples up to (not including) the closing punctuation.
  std::vector<TriplePattern> triplesUntil(std::string_view close, BlankMode mode) {
    std::vector<TriplePattern> out;
    while (!lexer_.peek().isPunct(close)) {
      if (lexer_.peek().type == TokenType::End) fail("unexpected end of input");
      if (acceptPunct(".")) continue;
      auto block = triplesBlock(mode);
      out.insert(out.end(), block.begin(), block.end());
    }
    return out;
  }

  std::vector<TriplePattern> triplesBlock(BlankMode mode) {
    std::vector<TriplePattern> out;
    Node subject;
    if (lexer_.peek().isPunct("[")) {
      lexer_.next();
      subject = freshBlank(mode);
      if (!lexer_.peek().isPunct("]")) propertyList(subject, mode, out);
      expectPunct("]");
      if (lexer_.peek().isPunct(".") || lexer_.peek().isPunct("}")) return out;
    } else {
      subject = term(mode, true);
      if (subject.term.isLiteral() && !subject.isVar()) {
        fail("literal in subject position");
      }
    }
    propertyList(subject, mode, out);
    return out;
  }

  void propertyList(const Node& subject, BlankMode mode,
                    std::vector<TriplePattern>& out) {
    while (true) {
      Node predicate;
      const auto& t = lexer_.peek();
      if (t.type == TokenType::Word && t.text == "a") {
        lexer_.next();
        predicate = Node::fixed(Term::iri(std::string(vocab::kRdfType)));
      } else if (t.type == TokenType::Variable) {
        predicate = Node::variable(lexer_.next().text);
      } else if (peekIri()) {
        predicate = Node::fixed(Term::iri(iri()));
      } else {
        fail("expected predicate but found " + describe(t));
      }
      const auto& after = lexer_.peek();
      for (std::string_view p : {"/", "|", "^", "*", "+"}) {
        if (after.isPunct(p)) fail("property paths are not supported");
      }
      while (true) {
        Node object;
        if (lexer_.peek().isPunct("[")) {
          lexer_.next();
          object = freshBlank(mode);
          if (!lexer_.peek().isPunct("]")) propertyList(object, mode, out);
          expectPunct("]");
        } else {
          object = term(mode, true);
        }
        out.push_back({subject, predicate, object});
        if (!acceptPunct(",")) break;
      }
      if (!acceptPunct(";")) return;
      while (acceptPunct(";")) {
      }
      const auto& next = lexer_.peek();
      if (next.isPunct(".") || next.isPunct("}") || next.isPunct("]")) return;
    }
  }

  Node freshBlank(BlankMode mode) {
    std::string label = "anon" + std::to_string(anonCounter_++);
    if (mode == BlankMode::AsVariable) {
      return Node::variable(std::string(kBlankVarPrefix) + label);
    }
    return Node::fixed(Term::blank(label));
  }

  Node term(BlankMode mode, bool allowVariable) {
    Token t = lexer_.next();
    switch (t.type) {
      case TokenType::Variable:
        if (!allowVariable) throw SyntaxError("variable not allowed here", t.line);
        return Node::variable(t.text);
      case TokenType::IriRef:
        return Node::fixed(
            Term::iri(base_.empty() ? t.text : rdf::resolveIri(base_, t.text)));
      case TokenType::PrefixedName:
        return Node::fixed(Term::iri(expandPrefixed(t)));
      case TokenType::BlankLabel:
        if (mode == BlankMode::AsVariable) {
          return Node::variable(std::string(kBlankVarPrefix) + t.text);
        }
        return Node::fixed(Term::blank(t.text));
      case TokenType::String:
        return Node::fixed(literalAfter(std::move(t.text)));
      case TokenType::Integer:
        return Node::fixed(Term::literal(t.text, vocab::kXsdInteger));
      case TokenType::Decimal:
        return Node::fixed(Term::literal(t.text, vocab::kXsdDecimal));
      case TokenType::Double:
        return Node::fixed(Term::literal(t.text, vocab::kXsdDouble));
      case TokenType::Word:
        if (t.text == "true" || t.text == "false") {
          return Node::fixed(Term::literal(t.text, vocab::kXsdBoolean));
        }
        break;
      case TokenType::Punct:
        if ((t.text == "-" || t.text == "+") &&
            (lexer_.peek().type == TokenType::Integer ||
             lexer_.peek().type == TokenType::Decimal ||
             lexer_.peek().type == TokenType::Double)) {
          Token num = lexer_.next();
          std::string lexical = (t.text == "-" ? "-" : "") + num.text;
          auto dt = num.type == TokenType::Integer   ? vocab::kXsdInteger
                    : num.type == TokenType::Decimal ? vocab::kXsdDecimal
                                                     : vocab::kXsdDouble;
          return Node::fixed(Term::literal(lexical, dt));
        }
        if (t.text == "(") {
          throw SyntaxError("RDF collections are not supported", t.line);
        }
        break;
      default:
        break;
    }
    throw SyntaxError("unexpected " + describe(t), t.line);
  }

  Term literalAfter(std::string lexical) {
    if (lexer_.peek().type == TokenType::LangTag) {
      return Term::langLiteral(std::move(lexical), lexer_.next().text);
    }
    if (acceptPunct("^^")) return Term::literal(std::move(lexical), iri());
    return Term::literal(std::move(lexical));
  }

  // ------------------------------------------------------------ expressions

  ExprPtr constraint() {
    if (lexer_.peek().isPunct("(")) return bracketted();
    return primary();
  }

  ExprPtr bracketted() {
    expectPunct("(");
    auto e = expression();
    expectPunct(")");
    return e;
  }

  ExprPtr expression() {
    auto left = andExpression();
    while (acceptPunct("||")) left = makeExpr(Expr::Op::Or, {left, andExpression()});
    return left;
  }

  ExprPtr andExpression() {
    auto left = relational();
    while (acceptPunct("&&")) left = makeExpr(Expr::Op::And, {left, relational()});
    return left;
  }

  ExprPtr relational() {
    auto left = additive();
    static const std::map<std::string, Expr::Op, std::less<>> kOps = {
        {"=", Expr::Op::Eq}, {"!=", Expr::Op::Ne}, {"<", Expr::Op::Lt},
        {">", Expr::Op::Gt}, {"<=", Expr::Op::Le}, {">=", Expr::Op::Ge}};
    const auto& t = lexer_.peek();
    if (t.type == TokenType::Punct) {
      if (auto it = kOps.find(t.text); it != kOps.end()) {
        lexer_.next();
        return makeExpr(it->second, {left, additive()});
      }
    }
    bool negated = false;
    if (t.isKeyword("NOT") && lexer_.peekSecond().isKeyword("IN")) {
      lexer_.next();
      negated = true;
    }
    if (acceptKeyword("IN")) {
      std::vector<ExprPtr> args{left};
      auto list = expressionList();
      args.insert(args.end(), list.begin(), list.end());
      return makeExpr(negated ? Expr::Op::NotIn : Expr::Op::In, std::move(args));
    }
    return left;
  }

  ExprPtr additive() {
    auto left = multiplicative();
    while (true) {
      if (acceptPunct("+")) {
        left = makeExpr(Expr::Op::Add, {left, multiplicative()});
      } else if (acceptPunct("-")) {
        left = makeExpr(Expr::Op::Sub, {left, multiplicative()});
      } else {
        return left;
      }
    }
  }

  ExprPtr multiplicative() {
    auto left = unary();
    while (true) {
      if (acceptPunct("*")) {
        left = makeExpr(Expr::Op::Mul, {left, unary()});
      } else if (acceptPunct("/")) {
        left = makeExpr(Expr::Op::Div, {left, unary()});
      } else {
        return left;
      }
    }
  }

  ExprPtr unary() {
    if (acceptPunct("!")) return makeExpr(Expr::Op::Not, {primary()});
    if (acceptPunct("-")) return makeExpr(Expr::Op::Neg, {primary()});
    if (acceptPunct("+")) return makeExpr(Expr::Op::Plus, {primary()});
    return primary();
  }

  std::vector<ExprPtr> expressionList() {
    std::vector<ExprPtr> out;
    expectPunct("(");
    if (acceptPunct(")")) return out;
    out.push_back(expression());
    while (acceptPunct(",")) out.push_back(expression());
    expectPunct(")");
    return out;
  }

  ExprPtr constant(Term value) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Const;
    e->value = std::move(value);
    return e;
  }

  ExprPtr primary() {
    const auto& t = lexer_.peek();
    if (t.isPunct("(")) return bracketted();
    if (t.type == TokenType::Variable) {
      auto e = std::make_shared<Expr>();
      e->op = Expr::Op::Var;
      e->name = lexer_.next().text;
      return e;
    }
    if (t.type == TokenType::Word) {
      auto name = upper(t.text);
      if (name == "NOT" && lexer_.peekSecond().isKeyword("EXISTS")) {
        lexer_.next();
        lexer_.next();
        auto e = std::make_shared<Expr>();
        e->op = Expr::Op::NotExists;
        e->pattern = std::make_shared<GroupPattern>(groupPattern());
        return e;
      }
      if (name == "EXISTS") {
        lexer_.next();
        auto e = std::make_shared<Expr>();
        e->op = Expr::Op::Exists;
        e->pattern = std::make_shared<GroupPattern>(groupPattern());
        return e;
      }
      if (kAggregates.contains(name)) fail("aggregates are not supported");
      if (kBuiltins.contains(name)) {
        lexer_.next();
        auto e = std::make_shared<Expr>();
        e->op = Expr::Op::Call;
        e->name = name;
        if (name == "BOUND") {
          expectPunct("(");
          Token v = lexer_.next();
          if (v.type != TokenType::Variable) fail("BOUND expects a variable");
          expectPunct(")");
          auto var = std::make_shared<Expr>();
          var->op = Expr::Op::Var;
          var->name = v.text;
          e->args.push_back(var);
        } else {
          e->args = expressionList();
        }
        return e;
      }
      if (t.text == "true" || t.text == "false") {
        return constant(Term::literal(lexer_.next().text, vocab::kXsdBoolean));
      }
      fail("unknown function " + t.text);
    }
    if (peekIri()) {
      std::string fn = iri();
      if (lexer_.peek().isPunct("(")) {
        auto e = std::make_shared<Expr>();
        e->op = Expr::Op::Call;
        e->name = fn;
        e->args = expressionList();
        return e;
      }
      return constant(Term::iri(fn));
    }
    Node n = term(BlankMode::AsTerm, false);
    if (n.term.isBlank()) fail("blank node in expression");
    return constant(n.term);
  }

  // ---------------------------------------------------------------- updates

  UpdateOp updateOp() {
    UpdateOp op;
    if (acceptKeyword("INSERT")) {
      if (acceptKeyword("DATA")) {
        op.kind = UpdateOp::Kind::InsertData;
        op.insertQuads = quads(BlankMode::AsTerm, false);
        return op;
      }
      op.kind = UpdateOp::Kind::Modify;
      op.insertQuads = quads(BlankMode::AsTerm, true);
      modifyTail(op);
      return op;
    }
    if (acceptKeyword("DELETE")) {
      if (acceptKeyword("DATA")) {
        op.kind = UpdateOp::Kind::DeleteData;
        op.deleteQuads = quads(BlankMode::AsTerm, false);
        return op;
      }
      if (acceptKeyword("WHERE")) {
        op.kind = UpdateOp::Kind::DeleteWhere;
        op.deleteQuads = quads(BlankMode::AsVariable, true);
        op.where = groupFromQuads(op.deleteQuads);
        return op;
      }
      op.kind = UpdateOp::Kind::Modify;
      op.deleteQuads = quads(BlankMode::AsVariable, true);
      if (acceptKeyword("INSERT")) op.insertQuads = quads(BlankMode::AsTerm, true);
      modifyTail(op);
      return op;
    }
    if (acceptKeyword("WITH")) {
      auto graph = iri();
      op = updateOp();
      if (op.kind != UpdateOp::Kind::Modify) fail("WITH requires DELETE/INSERT");
      op.withGraph = graph;
      return op;
    }
    for (auto [word, kind] : {std::pair{"CLEAR", UpdateOp::Kind::Clear},
                              std::pair{"DROP", UpdateOp::Kind::Drop}}) {
      if (acceptKeyword(word)) {
        op.kind = kind;
        op.silent = acceptKeyword("SILENT");
        if (acceptKeyword("DEFAULT")) {
          op.target = UpdateOp::Target::Default;
        } else if (acceptKeyword("NAMED")) {
          op.target = UpdateOp::Target::Named;
        } else if (acceptKeyword("ALL")) {
          op.target = UpdateOp::Target::All;
        } else {
          expectKeyword("GRAPH");
          op.target = UpdateOp::Target::Graph;
          op.graphIri = iri();
        }
        return op;
      }
    }
    if (acceptKeyword("CREATE")) {
      op.kind = UpdateOp::Kind::Create;
      op.silent = acceptKeyword("SILENT");
      expectKeyword("GRAPH");
      op.target = UpdateOp::Target::Graph;
      op.graphIri = iri();
      return op;
    }
    if (lexer_.peek().isKeyword("LOAD") || lexer_.peek().isKeyword("COPY") ||
        lexer_.peek().isKeyword("MOVE") || lexer_.peek().isKeyword("ADD")) {
      fail(lexer_.peek().text + " is not supported");
    }
    fail("expected an update operation but found " + describe(lexer_.peek()));
  }

  void modifyTail(UpdateOp& op) {
    if (lexer_.peek().isKeyword("USING")) fail("USING is not supported");
    expectKeyword("WHERE");
    op.where = groupPattern();
  }

  std::vector<QuadPattern> quads(BlankMode mode, bool allowVariables) {
    std::vector<QuadPattern> out;
    expectPunct("{");
    while (!acceptPunct("}")) {
      if (lexer_.peek().type == TokenType::End) fail("unterminated quad block");
      if (acceptPunct(".")) continue;
      if (acceptKeyword("GRAPH")) {
        Node graph = allowVariables ? varOrIri() : Node::fixed(Term::iri(iri()));
        expectPunct("{");
        for (auto& t : triplesUntil("}", mode)) out.push_back({graph, std::move(t)});
        expectPunct("}");
      } else {
        for (auto& t : triplesBlock(mode)) out.push_back({std::nullopt, std::move(t)});
      }
    }
    if (!allowVariables) {
      for (const auto& q : out) {
        for (const auto* n : {&q.triple.subject, &q.triple.predicate, &q.triple.object}) {
          if (n->isVar()) fail("variables are not allowed in DATA blocks");
        }
      }
    }
    return out;
  }

  static GroupPattern groupFromQuads(const std::vector<QuadPattern>& quads) {
    GroupPattern group;
    for (const auto& q : quads) {
      if (!q.graph) {
        if (group.elements.empty() ||
            group.elements.back().kind != Element::Kind::Triples) {
          group.elements.push_back(Element{.kind = Element::Kind::Triples});
        }
        group.elements.back().triples.push_back(q.triple);
        continue;
      }
      Element graph{.kind = Element::Kind::Graph, .graph = *q.graph};
      graph.groups.push_back(GroupPattern{
          {Element{.kind = Element::Kind::Triples, .triples = {q.triple}}}});
      group.elements.push_back(std::move(graph));
    }
    return group;
  }

  Lexer lexer_;
  std::map<std::string, std::string> prefixes_;
  std::string base_;
  int anonCounter_ = 0;
};

}  // namespace

// ____________________________________________________________________________
Query parseQuery(std::string_view text) { return Parser(text).query(); }

// ____________________________________________________________________________
std::vector<UpdateOp> parseUpdate(std::string_view text) {
  return Parser(text).update();
}

}  // namespace ontoapi::sparql
