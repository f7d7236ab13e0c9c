#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <regex>
#include <set>

#include "ontoapi/rdf/turtle.h"
#include "ontoapi/rdf/vocab.h"
#include "ontoapi/sparql/engine.h"
#include "ontoapi/sparql/parser.h"

namespace ontoapi::sparql {

using rdf::Graph;
using rdf::Term;
using rdf::Triple;

namespace {

using Graphs = std::vector<const Graph*>;
using Value = std::optional<Term>;  // nullopt: unbound or type error

const std::set<std::string_view> kIntegerTypes = {
    vocab::kXsdInteger,
    vocab::kXsdInt,
    vocab::kXsdLong,
    "http://www.w3.org/2001/XMLSchema#short",
    "http://www.w3.org/2001/XMLSchema#byte",
    "http://www.w3.org/2001/XMLSchema#nonNegativeInteger",
    "http://www.w3.org/2001/XMLSchema#positiveInteger",
    "http://www.w3.org/2001/XMLSchema#negativeInteger",
    "http://www.w3.org/2001/XMLSchema#nonPositiveInteger",
    "http://www.w3.org/2001/XMLSchema#unsignedLong",
    "http://www.w3.org/2001/XMLSchema#unsignedInt",
    "http://www.w3.org/2001/XMLSchema#unsignedShort",
    "http://www.w3.org/2001/XMLSchema#unsignedByte"};

enum class NumKind { Integer, Decimal, Double };

struct Num {
  NumKind kind = NumKind::Integer;
  long long i = 0;
  double d = 0;
  double value() const { return kind == NumKind::Integer ? static_cast<double>(i) : d; }
};

std::optional<Num> toNum(const Term& t) {
  if (!t.isLiteral() || t.datatype.empty()) return std::nullopt;
  const std::string& s = t.value;
  if (kIntegerTypes.contains(t.datatype)) {
    Num n;
    const char* begin = s.data() + (s.starts_with('+') ? 1 : 0);
    auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), n.i);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return n;
  }
  NumKind kind;
  if (t.datatype == vocab::kXsdDecimal) {
    kind = NumKind::Decimal;
  } else if (t.datatype == vocab::kXsdDouble || t.datatype == vocab::kXsdFloat) {
    kind = NumKind::Double;
  } else {
    return std::nullopt;
  }
  Num n{.kind = kind};
  if (s == "INF" || s == "+INF") {
    n.d = HUGE_VAL;
    return n;
  }
  if (s == "-INF") {
    n.d = -HUGE_VAL;
    return n;
  }
  if (s == "NaN") {
    n.d = std::nan("");
    return n;
  }
  const char* begin = s.data() + (s.starts_with('+') ? 1 : 0);
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), n.d);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return n;
}

std::string formatDouble(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "INF" : "-INF";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, ptr);
}

Term numTerm(const Num& n) {
  switch (n.kind) {
    case NumKind::Integer:
      return Term::literal(std::to_string(n.i), vocab::kXsdInteger);
    case NumKind::Decimal: {
      auto s = formatDouble(n.d);
      if (s.find_first_of(".eEIN") == std::string::npos) s += ".0";
      return Term::literal(s, vocab::kXsdDecimal);
    }
    case NumKind::Double:
      return Term::literal(formatDouble(n.d), vocab::kXsdDouble);
  }
  return {};
}

Term boolTerm(bool b) {
  return Term::literal(b ? "true" : "false", vocab::kXsdBoolean);
}

bool isStringLiteral(const Term& t) {
  return t.isLiteral() && t.datatype.empty();
}

bool isSimple(const Term& t) { return isStringLiteral(t) && t.language.empty(); }

std::optional<bool> ebv(const Value& v) {
  if (!v || !v->isLiteral()) return std::nullopt;
  if (v->datatype == vocab::kXsdBoolean) {
    if (v->value == "true" || v->value == "1") return true;
    return false;
  }
  if (auto n = toNum(*v)) {
    double x = n->value();
    return !(std::isnan(x) || x == 0);
  }
  if (isStringLiteral(*v)) return !v->value.empty();
  return std::nullopt;
}

template <typename T>
int cmp(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

std::optional<int> compareValues(const Term& a, const Term& b) {
  auto na = toNum(a);
  auto nb = toNum(b);
  if (na && nb) {
    if (na->kind == NumKind::Integer && nb->kind == NumKind::Integer) {
      return cmp(na->i, nb->i);
    }
    double x = na->value(), y = nb->value();
    if (std::isnan(x) || std::isnan(y)) return std::nullopt;
    return cmp(x, y);
  }
  if (!a.isLiteral() || !b.isLiteral()) return std::nullopt;
  if (isStringLiteral(a) && isStringLiteral(b) && a.language == b.language) {
    return cmp(a.value, b.value);
  }
  if (a.datatype == b.datatype && !a.datatype.empty()) {
    if (a.datatype == vocab::kXsdBoolean) {
      auto ba = a.value == "true" || a.value == "1";
      auto bb = b.value == "true" || b.value == "1";
      return cmp(ba, bb);
    }
    if (a.datatype == vocab::kXsdDateTime) return cmp(a.value, b.value);
    if (a.value == b.value) return 0;
  }
  return std::nullopt;
}

std::optional<bool> equalValues(const Term& a, const Term& b) {
  if (auto c = compareValues(a, b)) return *c == 0;
  if (a == b) return true;
  if (a.isLiteral() && b.isLiteral() && !isStringLiteral(a) && !isStringLiteral(b) &&
      a.datatype != b.datatype && !toNum(a) && !toNum(b)) {
    return std::nullopt;
  }
  if (toNum(a) && toNum(b)) return std::nullopt;  // NaN
  return false;
}

// SPARQL ORDER BY ordering.
int orderCompare(const Value& a, const Value& b) {
  if (!a || !b) return cmp(a.has_value(), b.has_value());
  auto rank = [](const Term& t) {
    return t.isBlank() ? 0 : (t.isIri() ? 1 : 2);
  };
  if (rank(*a) != rank(*b)) return cmp(rank(*a), rank(*b));
  if (a->isLiteral()) {
    if (auto c = compareValues(*a, *b)) {
      if (*c != 0) return *c;
    }
  }
  return cmp(std::tie(a->value, a->datatype, a->language),
             std::tie(b->value, b->datatype, b->language));
}

std::size_t utf8Length(std::string_view s) {
  return static_cast<std::size_t>(std::ranges::count_if(
      s, [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

// Byte offset of the code point with index `cp` (clamped).
std::size_t utf8Offset(std::string_view s, std::size_t cp) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
      if (seen == cp) return i;
      ++seen;
    }
  }
  return s.size();
}

Term sameKindString(const Term& like, std::string value) {
  if (!like.language.empty()) return Term::langLiteral(std::move(value), like.language);
  return Term::literal(std::move(value));
}

bool langMatches(std::string tag, std::string range) {
  auto lower = [](std::string& s) {
    std::ranges::transform(s, s.begin(), [](unsigned char c) { return std::tolower(c); });
  };
  lower(tag);
  lower(range);
  if (range == "*") return !tag.empty();
  return tag == range || (tag.starts_with(range) && tag[range.size()] == '-');
}

bool hasVar(const Binding& b, const std::string& v) { return b.contains(v); }

bool compatible(const Binding& a, const Binding& b) {
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it != b.end() && it->second != v) return false;
  }
  return true;
}

Binding merged(Binding a, const Binding& b) {
  for (const auto& [k, v] : b) a.emplace(k, v);
  return a;
}

struct EvalDataset {
  Graphs defaultGraphs;
  std::map<std::string, const Graph*> named;
};

class Evaluator {
 public:
  explicit Evaluator(EvalDataset dataset) : dataset_(std::move(dataset)) {}

  const EvalDataset& dataset() const { return dataset_; }

  std::vector<Binding> group(const GroupPattern& g, const Graphs& active,
                             std::vector<Binding> input) {
    std::vector<const Expr*> filters;
    std::vector<Binding> current = std::move(input);
    for (const auto& el : g.elements) {
      if (current.empty() && el.kind != Element::Kind::Filter) break;
      switch (el.kind) {
        case Element::Kind::Triples:
          for (const auto& tp : el.triples) {
            std::vector<Binding> next;
            for (const auto& b : current) matchTriple(tp, active, b, next);
            current = std::move(next);
            if (current.empty()) break;
          }
          break;
        case Element::Kind::Group:
          current = group(el.groups[0], active, std::move(current));
          break;
        case Element::Kind::Optional: {
          std::vector<Binding> next;
          for (auto& b : current) {
            auto extended = group(el.groups[0], active, {b});
            if (extended.empty()) {
              next.push_back(std::move(b));
            } else {
              std::ranges::move(extended, std::back_inserter(next));
            }
          }
          current = std::move(next);
          break;
        }
        case Element::Kind::Union: {
          std::vector<Binding> next;
          for (const auto& b : current) {
            for (const auto& branch : el.groups) {
              std::ranges::move(group(branch, active, {b}), std::back_inserter(next));
            }
          }
          current = std::move(next);
          break;
        }
        case Element::Kind::Minus: {
          auto removed = group(el.groups[0], active, {Binding{}});
          std::erase_if(current, [&](const Binding& b) {
            return std::ranges::any_of(removed, [&](const Binding& r) {
              bool shares = std::ranges::any_of(
                  r, [&](const auto& kv) { return hasVar(b, kv.first); });
              return shares && compatible(b, r);
            });
          });
          break;
        }
        case Element::Kind::Graph:
          current = graphPattern(el, std::move(current));
          break;
        case Element::Kind::Filter:
          filters.push_back(el.expr.get());
          break;
        case Element::Kind::Bind:
          for (auto& b : current) {
            if (b.contains(el.var)) {
              throw EvaluationError("BIND to already bound variable ?" + el.var);
            }
            if (auto v = eval(*el.expr, b, active)) b.emplace(el.var, *v);
          }
          break;
        case Element::Kind::Values: {
          std::vector<Binding> next;
          for (const auto& b : current) {
            for (const auto& row : el.values.rows) {
              Binding rb;
              for (std::size_t i = 0; i < row.size(); ++i) {
                if (row[i]) rb.emplace(el.values.vars[i], *row[i]);
              }
              if (compatible(b, rb)) next.push_back(merged(b, rb));
            }
          }
          current = std::move(next);
          break;
        }
        case Element::Kind::SubQuery: {
          auto rows = select(*el.subquery, active).rows;
          std::vector<Binding> next;
          for (const auto& b : current) {
            for (const auto& r : rows) {
              if (compatible(b, r)) next.push_back(merged(b, r));
            }
          }
          current = std::move(next);
          break;
        }
      }
    }
    if (!filters.empty()) {
      std::erase_if(current, [&](const Binding& b) {
        return !std::ranges::all_of(filters, [&](const Expr* f) {
          return ebv(eval(*f, b, active)).value_or(false);
        });
      });
    }
    return current;
  }

  // Rows after ORDER BY, projection, DISTINCT, OFFSET and LIMIT.
  SelectResult select(const Query& q, const Graphs& active) {
    auto rows = solutions(q, active);
    SelectResult result;
    if (q.selectAll) {
      std::set<std::string> vars;
      for (const auto& r : rows) {
        for (const auto& [k, v] : r) {
          if (!k.starts_with("@")) vars.insert(k);
        }
      }
      result.variables.assign(vars.begin(), vars.end());
    } else {
      for (const auto& p : q.projection) result.variables.push_back(p.var);
    }
    std::set<Binding> seen;
    for (auto& row : rows) {
      Binding out;
      if (q.selectAll) {
        for (const auto& v : result.variables) {
          if (auto it = row.find(v); it != row.end()) out.emplace(v, it->second);
        }
      } else {
        for (const auto& p : q.projection) {
          if (p.expr) {
            if (row.contains(p.var)) {
              throw EvaluationError("projection reuses variable ?" + p.var);
            }
            if (auto v = eval(*p.expr, row, active)) {
              row.emplace(p.var, *v);
              out.emplace(p.var, *v);
            }
          } else if (auto it = row.find(p.var); it != row.end()) {
            out.emplace(p.var, it->second);
          }
        }
      }
      if (q.distinct && !seen.insert(out).second) continue;
      result.rows.push_back(std::move(out));
    }
    slice(result.rows, q);
    return result;
  }

  // WHERE solutions in ORDER BY order; slicing only applies when the
  // caller does not project (CONSTRUCT / ASK).
  std::vector<Binding> solutions(const Query& q, const Graphs& active) {
    auto rows = group(q.where, active, {Binding{}});
    if (!q.orderBy.empty()) {
      std::vector<std::pair<std::vector<Value>, Binding>> keyed;
      keyed.reserve(rows.size());
      for (auto& r : rows) {
        std::vector<Value> keys;
        for (const auto& k : q.orderBy) keys.push_back(eval(*k.expr, r, active));
        keyed.emplace_back(std::move(keys), std::move(r));
      }
      std::ranges::stable_sort(keyed, [&](const auto& a, const auto& b) {
        for (std::size_t i = 0; i < q.orderBy.size(); ++i) {
          int c = orderCompare(a.first[i], b.first[i]);
          if (c != 0) return q.orderBy[i].descending ? c > 0 : c < 0;
        }
        return false;
      });
      rows.clear();
      for (auto& [keys, r] : keyed) rows.push_back(std::move(r));
    }
    return rows;
  }

  static void slice(std::vector<Binding>& rows, const Query& q) {
    auto offset = static_cast<std::size_t>(std::max(0LL, q.offset));
    if (offset >= rows.size()) {
      rows.clear();
    } else {
      rows.erase(rows.begin(), rows.begin() + static_cast<long>(offset));
    }
    if (q.limit && rows.size() > static_cast<std::size_t>(std::max(0LL, *q.limit))) {
      rows.resize(static_cast<std::size_t>(std::max(0LL, *q.limit)));
    }
  }

  Value eval(const Expr& e, const Binding& b, const Graphs& active) {
    using Op = Expr::Op;
    switch (e.op) {
      case Op::Var: {
        auto it = b.find(e.name);
        if (it == b.end()) return std::nullopt;
        return it->second;
      }
      case Op::Const:
        return e.value;
      case Op::Or: {
        auto l = ebv(eval(*e.args[0], b, active));
        auto r = ebv(eval(*e.args[1], b, active));
        if (l == true || r == true) return boolTerm(true);
        if (l && r) return boolTerm(false);
        return std::nullopt;
      }
      case Op::And: {
        auto l = ebv(eval(*e.args[0], b, active));
        auto r = ebv(eval(*e.args[1], b, active));
        if (l == false || r == false) return boolTerm(false);
        if (l && r) return boolTerm(true);
        return std::nullopt;
      }
      case Op::Not: {
        auto v = ebv(eval(*e.args[0], b, active));
        if (!v) return std::nullopt;
        return boolTerm(!*v);
      }
      case Op::Neg:
      case Op::Plus: {
        auto v = eval(*e.args[0], b, active);
        auto n = v ? toNum(*v) : std::nullopt;
        if (!n) return std::nullopt;
        if (e.op == Op::Neg) {
          n->i = -n->i;
          n->d = -n->d;
        }
        return numTerm(*n);
      }
      case Op::Eq:
      case Op::Ne: {
        auto l = eval(*e.args[0], b, active);
        auto r = eval(*e.args[1], b, active);
        if (!l || !r) return std::nullopt;
        auto eq = equalValues(*l, *r);
        if (!eq) return std::nullopt;
        return boolTerm(e.op == Op::Eq ? *eq : !*eq);
      }
      case Op::Lt:
      case Op::Gt:
      case Op::Le:
      case Op::Ge: {
        auto l = eval(*e.args[0], b, active);
        auto r = eval(*e.args[1], b, active);
        if (!l || !r) return std::nullopt;
        auto c = compareValues(*l, *r);
        if (!c) return std::nullopt;
        bool result = e.op == Op::Lt   ? *c < 0
                      : e.op == Op::Gt ? *c > 0
                      : e.op == Op::Le ? *c <= 0
                                       : *c >= 0;
        return boolTerm(result);
      }
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
        return arithmetic(e, b, active);
      case Op::In:
      case Op::NotIn: {
        auto needle = eval(*e.args[0], b, active);
        if (!needle) return std::nullopt;
        bool error = false;
        for (std::size_t i = 1; i < e.args.size(); ++i) {
          auto v = eval(*e.args[i], b, active);
          auto eq = v ? equalValues(*needle, *v) : std::nullopt;
          if (eq == true) return boolTerm(e.op == Op::In);
          if (!eq) error = true;
        }
        if (error) return std::nullopt;
        return boolTerm(e.op == Op::NotIn);
      }
      case Op::Exists:
      case Op::NotExists: {
        bool found = !group(*e.pattern, active, {b}).empty();
        return boolTerm(e.op == Op::Exists ? found : !found);
      }
      case Op::Call:
        return call(e, b, active);
    }
    return std::nullopt;
  }

 private:
  std::vector<Binding> graphPattern(const Element& el, std::vector<Binding> current) {
    std::vector<Binding> next;
    if (!el.graph.isVar()) {
      auto it = dataset_.named.find(el.graph.term.value);
      if (it == dataset_.named.end()) return {};
      return group(el.groups[0], {it->second}, std::move(current));
    }
    for (const auto& b : current) {
      if (auto bound = b.find(el.graph.var); bound != b.end()) {
        auto it = dataset_.named.find(bound->second.value);
        if (!bound->second.isIri() || it == dataset_.named.end()) continue;
        std::ranges::move(group(el.groups[0], {it->second}, {b}),
                          std::back_inserter(next));
        continue;
      }
      for (const auto& [iri, graph] : dataset_.named) {
        Binding withGraph = b;
        withGraph.emplace(el.graph.var, Term::iri(iri));
        std::ranges::move(group(el.groups[0], {graph}, {withGraph}),
                          std::back_inserter(next));
      }
    }
    return next;
  }

  static std::optional<Term> resolve(const Node& n, const Binding& b) {
    if (!n.isVar()) return n.term;
    auto it = b.find(n.var);
    if (it == b.end()) return std::nullopt;
    return it->second;
  }

  static bool bindVar(const Node& n, const Term& value, Binding& b) {
    if (!n.isVar()) return true;
    auto [it, inserted] = b.emplace(n.var, value);
    return inserted || it->second == value;
  }

  static void matchTriple(const TriplePattern& tp, const Graphs& active,
                          const Binding& b, std::vector<Binding>& out) {
    auto s = resolve(tp.subject, b);
    auto p = resolve(tp.predicate, b);
    auto o = resolve(tp.object, b);
    if ((s && s->isLiteral()) || (p && !p->isIri())) return;
    std::vector<Triple> found;
    if (active.size() == 1) {
      found = active[0]->match(s, p, o);
    } else {
      std::set<Triple> all;
      for (const auto* g : active) {
        for (auto& t : g->match(s, p, o)) all.insert(std::move(t));
      }
      found.assign(all.begin(), all.end());
    }
    for (const auto& t : found) {
      Binding nb = b;
      if (bindVar(tp.subject, t.subject, nb) && bindVar(tp.predicate, t.predicate, nb) &&
          bindVar(tp.object, t.object, nb)) {
        out.push_back(std::move(nb));
      }
    }
  }

  Value arithmetic(const Expr& e, const Binding& b, const Graphs& active) {
    auto l = eval(*e.args[0], b, active);
    auto r = eval(*e.args[1], b, active);
    auto x = l ? toNum(*l) : std::nullopt;
    auto y = r ? toNum(*r) : std::nullopt;
    if (!x || !y) return std::nullopt;
    using Op = Expr::Op;
    NumKind kind = std::max(x->kind, y->kind);
    if (e.op == Op::Div && kind == NumKind::Integer) kind = NumKind::Decimal;
    if (kind == NumKind::Integer) {
      long long result = 0;
      bool overflow = false;
      switch (e.op) {
        case Op::Add:
          overflow = __builtin_add_overflow(x->i, y->i, &result);
          break;
        case Op::Sub:
          overflow = __builtin_sub_overflow(x->i, y->i, &result);
          break;
        default:
          overflow = __builtin_mul_overflow(x->i, y->i, &result);
          break;
      }
      if (!overflow) return numTerm(Num{.kind = kind, .i = result});
      kind = NumKind::Double;
    }
    double a = x->value(), c = y->value();
    if (e.op == Op::Div && c == 0 && kind == NumKind::Decimal) return std::nullopt;
    double result = e.op == Op::Add   ? a + c
                    : e.op == Op::Sub ? a - c
                    : e.op == Op::Mul ? a * c
                                      : a / c;
    return numTerm(Num{.kind = kind, .d = result});
  }

  Value call(const Expr& e, const Binding& b, const Graphs& active) {
    const std::string& fn = e.name;
    auto arg = [&](std::size_t i) -> Value {
      if (i >= e.args.size()) return std::nullopt;
      return eval(*e.args[i], b, active);
    };
    auto arity = [&](std::size_t min, std::size_t max) {
      if (e.args.size() < min || e.args.size() > max) {
        throw EvaluationError("wrong number of arguments for " + fn);
      }
    };
    // Control flow first: these do not evaluate every argument.
    if (fn == "BOUND") {
      arity(1, 1);
      return boolTerm(b.contains(e.args[0]->name));
    }
    if (fn == "IF") {
      arity(3, 3);
      auto c = ebv(arg(0));
      if (!c) return std::nullopt;
      return arg(*c ? 1 : 2);
    }
    if (fn == "COALESCE") {
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (auto v = arg(i)) return v;
      }
      return std::nullopt;
    }

    if (fn == "STR") {
      arity(1, 1);
      auto v = arg(0);
      if (!v || v->isBlank()) return std::nullopt;
      return Term::literal(v->value);
    }
    if (fn == "LANG") {
      arity(1, 1);
      auto v = arg(0);
      if (!v || !v->isLiteral()) return std::nullopt;
      return Term::literal(v->language);
    }
    if (fn == "DATATYPE") {
      arity(1, 1);
      auto v = arg(0);
      if (!v || !v->isLiteral()) return std::nullopt;
      return Term::iri(v->effectiveDatatype());
    }
    if (fn == "LANGMATCHES") {
      arity(2, 2);
      auto t = arg(0), r = arg(1);
      if (!t || !r || !isSimple(*t) || !isSimple(*r)) return std::nullopt;
      return boolTerm(langMatches(t->value, r->value));
    }
    if (fn == "IRI" || fn == "URI") {
      arity(1, 1);
      auto v = arg(0);
      if (!v || v->isBlank()) return std::nullopt;
      if (v->isIri()) return v;
      if (!isSimple(*v)) return std::nullopt;
      return Term::iri(v->value);
    }
    if (fn == "ISIRI" || fn == "ISURI" || fn == "ISBLANK" || fn == "ISLITERAL" ||
        fn == "ISNUMERIC") {
      arity(1, 1);
      auto v = arg(0);
      if (!v) return std::nullopt;
      bool r = fn == "ISBLANK"     ? v->isBlank()
               : fn == "ISLITERAL" ? v->isLiteral()
               : fn == "ISNUMERIC" ? toNum(*v).has_value()
                                   : v->isIri();
      return boolTerm(r);
    }
    if (fn == "SAMETERM") {
      arity(2, 2);
      auto x = arg(0), y = arg(1);
      if (!x || !y) return std::nullopt;
      return boolTerm(*x == *y);
    }
    if (fn == "STRLEN") {
      arity(1, 1);
      auto v = arg(0);
      if (!v || !isStringLiteral(*v)) return std::nullopt;
      return Term::literal(std::to_string(utf8Length(v->value)), vocab::kXsdInteger);
    }
    if (fn == "LCASE" || fn == "UCASE") {
      arity(1, 1);
      auto v = arg(0);
      if (!v || !isStringLiteral(*v)) return std::nullopt;
      std::string s = v->value;
      std::ranges::transform(s, s.begin(), [&](unsigned char c) {
        return fn == "LCASE" ? std::tolower(c) : std::toupper(c);
      });
      return sameKindString(*v, std::move(s));
    }
    if (fn == "CONTAINS" || fn == "STRSTARTS" || fn == "STRENDS" ||
        fn == "STRBEFORE" || fn == "STRAFTER") {
      arity(2, 2);
      auto x = arg(0), y = arg(1);
      if (!x || !y || !isStringLiteral(*x) || !isStringLiteral(*y)) {
        return std::nullopt;
      }
      if (!y->language.empty() && y->language != x->language) return std::nullopt;
      const auto& s = x->value;
      const auto& t = y->value;
      if (fn == "CONTAINS") return boolTerm(s.find(t) != std::string::npos);
      if (fn == "STRSTARTS") return boolTerm(s.starts_with(t));
      if (fn == "STRENDS") return boolTerm(s.ends_with(t));
      auto pos = s.find(t);
      if (pos == std::string::npos) return Term::literal("");
      if (fn == "STRBEFORE") return sameKindString(*x, s.substr(0, pos));
      return sameKindString(*x, s.substr(pos + t.size()));
    }
    if (fn == "SUBSTR") {
      arity(2, 3);
      auto v = arg(0);
      auto start = arg(1) ? toNum(*arg(1)) : std::nullopt;
      if (!v || !isStringLiteral(*v) || !start) return std::nullopt;
      auto from = static_cast<long long>(std::llround(start->value())) - 1;
      long long count = -1;
      if (e.args.size() == 3) {
        auto len = arg(2) ? toNum(*arg(2)) : std::nullopt;
        if (!len) return std::nullopt;
        count = std::llround(len->value());
        if (from < 0) count += from;
        if (count < 0) count = 0;
      }
      from = std::max(0LL, from);
      auto begin = utf8Offset(v->value, static_cast<std::size_t>(from));
      auto end = count < 0 ? v->value.size()
                           : utf8Offset(v->value, static_cast<std::size_t>(from + count));
      return sameKindString(*v, v->value.substr(begin, end - begin));
    }
    if (fn == "CONCAT") {
      std::string out;
      std::optional<std::string> lang;
      bool first = true;
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        auto v = arg(i);
        if (!v || !isStringLiteral(*v)) return std::nullopt;
        out += v->value;
        if (first) {
          lang = v->language;
          first = false;
        } else if (lang != v->language) {
          lang = "";
        }
      }
      if (lang && !lang->empty()) return Term::langLiteral(out, *lang);
      return Term::literal(out);
    }
    if (fn == "REGEX" || fn == "REPLACE") {
      bool replace = fn == "REPLACE";
      arity(replace ? 3 : 2, replace ? 4 : 3);
      auto text = arg(0), pattern = arg(1);
      Value flags = arg(replace ? 3 : 2);
      if (!text || !pattern || !isStringLiteral(*text) || !isSimple(*pattern)) {
        return std::nullopt;
      }
      auto options = std::regex::ECMAScript;
      if (flags && flags->value.find('i') != std::string::npos) {
        options |= std::regex::icase;
      }
      try {
        std::regex re(pattern->value, options);
        if (!replace) return boolTerm(std::regex_search(text->value, re));
        auto with = arg(2);
        if (!with || !isSimple(*with)) return std::nullopt;
        return sameKindString(*text, std::regex_replace(text->value, re, with->value));
      } catch (const std::regex_error&) {
        return std::nullopt;
      }
    }
    if (fn == "STRDT" || fn == "STRLANG") {
      arity(2, 2);
      auto v = arg(0), x = arg(1);
      if (!v || !x || !isSimple(*v)) return std::nullopt;
      if (fn == "STRDT") {
        if (!x->isIri()) return std::nullopt;
        return Term::literal(v->value, x->value);
      }
      if (!isSimple(*x) || x->value.empty()) return std::nullopt;
      return Term::langLiteral(v->value, x->value);
    }
    if (fn == "ABS" || fn == "CEIL" || fn == "FLOOR" || fn == "ROUND") {
      arity(1, 1);
      auto v = arg(0);
      auto n = v ? toNum(*v) : std::nullopt;
      if (!n) return std::nullopt;
      if (n->kind == NumKind::Integer) {
        if (fn == "ABS") n->i = std::llabs(n->i);
        return numTerm(*n);
      }
      n->d = fn == "ABS"    ? std::fabs(n->d)
             : fn == "CEIL" ? std::ceil(n->d)
             : fn == "FLOOR" ? std::floor(n->d)
                             : std::floor(n->d + 0.5);
      return numTerm(*n);
    }
    // XSD constructor casts.
    if (fn.starts_with(vocab::kXsd)) {
      arity(1, 1);
      auto v = arg(0);
      if (!v || v->isBlank()) return std::nullopt;
      return cast(*v, fn);
    }
    throw EvaluationError("unsupported function " + fn);
  }

  static Value cast(const Term& v, const std::string& target) {
    if (target == vocab::kXsdString) return Term::literal(v.value);
    if (!v.isLiteral()) return std::nullopt;
    auto n = toNum(v);
    if (target == vocab::kXsdBoolean) {
      if (n) return boolTerm(n->value() != 0);
      if (v.value == "true" || v.value == "1") return boolTerm(true);
      if (v.value == "false" || v.value == "0") return boolTerm(false);
      return std::nullopt;
    }
    if (target == vocab::kXsdInteger || target == vocab::kXsdInt ||
        target == vocab::kXsdLong) {
      if (n) {
        long long i = n->kind == NumKind::Integer ? n->i
                                                  : static_cast<long long>(n->d);
        return Term::literal(std::to_string(i), target);
      }
      if (v.datatype == vocab::kXsdBoolean) {
        return Term::literal(v.value == "true" || v.value == "1" ? "1" : "0", target);
      }
      auto parsed = toNum(Term::literal(v.value, vocab::kXsdInteger));
      if (!parsed) return std::nullopt;
      return Term::literal(std::to_string(parsed->i), target);
    }
    if (target == vocab::kXsdDecimal || target == vocab::kXsdDouble ||
        target == vocab::kXsdFloat) {
      auto kind = target == vocab::kXsdDecimal ? NumKind::Decimal : NumKind::Double;
      if (!n) n = toNum(Term::literal(v.value, vocab::kXsdDouble));
      if (!n) return std::nullopt;
      auto t = numTerm(Num{.kind = kind, .d = n->value()});
      t.datatype = target;
      return t;
    }
    if (target == vocab::kXsdDateTime) return Term::literal(v.value, target);
    return std::nullopt;
  }

  EvalDataset dataset_;
};

EvalDataset queryDataset(const Query& q, const rdf::Dataset& data,
                         const DatasetSpec& spec) {
  const auto& defaults = spec.empty() ? q.from : spec.defaultGraphs;
  const auto& named = spec.empty() ? q.fromNamed : spec.namedGraphs;
  EvalDataset out;
  if (defaults.empty() && named.empty()) {
    out.defaultGraphs.push_back(&data.defaultGraph);
    for (const auto& [iri, g] : data.namedGraphs) {
      out.defaultGraphs.push_back(&g);
      out.named.emplace(iri, &g);
    }
    return out;
  }
  for (const auto& iri : defaults) {
    if (auto it = data.namedGraphs.find(iri); it != data.namedGraphs.end()) {
      out.defaultGraphs.push_back(&it->second);
    }
  }
  for (const auto& iri : named) {
    if (auto it = data.namedGraphs.find(iri); it != data.namedGraphs.end()) {
      out.named.emplace(iri, &it->second);
    }
  }
  return out;
}

Graphs activeDefault(const EvalDataset& d) {
  static const Graph kEmpty;
  if (d.defaultGraphs.empty()) return {&kEmpty};
  return d.defaultGraphs;
}

// Instantiates a template triple; nullopt when a variable is unbound or the
// result is not a valid RDF triple.
std::optional<Triple> instantiate(const TriplePattern& tp, const Binding& b,
                                  const std::string& blankScope) {
  auto term = [&](const Node& n) -> std::optional<Term> {
    if (n.isVar()) {
      auto it = b.find(n.var);
      if (it == b.end()) return std::nullopt;
      return it->second;
    }
    if (n.term.isBlank()) return Term::blank(blankScope + n.term.value);
    return n.term;
  };
  auto s = term(tp.subject);
  auto p = term(tp.predicate);
  auto o = term(tp.object);
  if (!s || !p || !o || s->isLiteral() || !p->isIri()) return std::nullopt;
  return Triple{*s, *p, *o};
}

Graph& targetGraph(rdf::Dataset& data, const std::optional<std::string>& iri) {
  return iri ? data.namedGraphs[*iri] : data.defaultGraph;
}

std::optional<std::string> quadGraph(const QuadPattern& q, const Binding& b,
                                     const std::optional<std::string>& with,
                                     bool& valid) {
  valid = true;
  if (!q.graph) return with;
  if (!q.graph->isVar()) return q.graph->term.value;
  auto it = b.find(q.graph->var);
  if (it == b.end() || !it->second.isIri()) {
    valid = false;
    return std::nullopt;
  }
  return it->second.value;
}

void applyOne(const UpdateOp& op, rdf::Dataset& data) {
  using Kind = UpdateOp::Kind;
  switch (op.kind) {
    case Kind::InsertData:
    case Kind::DeleteData: {
      auto scope = rdf::freshBlankScope();
      for (const auto& q : op.kind == Kind::InsertData ? op.insertQuads : op.deleteQuads) {
        auto graph = q.graph ? std::optional(q.graph->term.value) : std::nullopt;
        auto t = instantiate(q.triple, {}, scope);
        if (!t) throw EvaluationError("invalid triple in DATA block");
        if (op.kind == Kind::InsertData) {
          targetGraph(data, graph).insert(*t);
        } else if (!graph) {
          data.defaultGraph.erase(*t);
        } else if (auto it = data.namedGraphs.find(*graph); it != data.namedGraphs.end()) {
          it->second.erase(*t);
        }
      }
      break;
    }
    case Kind::DeleteWhere:
    case Kind::Modify: {
      EvalDataset d;
      if (op.withGraph) {
        if (auto it = data.namedGraphs.find(*op.withGraph); it != data.namedGraphs.end()) {
          d.defaultGraphs.push_back(&it->second);
        }
      } else {
        d.defaultGraphs.push_back(&data.defaultGraph);
      }
      for (const auto& [iri, g] : data.namedGraphs) d.named.emplace(iri, &g);
      Evaluator ev(d);
      auto rows = ev.group(op.where, activeDefault(ev.dataset()), {Binding{}});
      std::vector<std::pair<std::optional<std::string>, Triple>> removals, additions;
      auto scope = rdf::freshBlankScope();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& q : op.deleteQuads) {
          bool valid;
          auto graph = quadGraph(q, rows[i], op.withGraph, valid);
          auto t = instantiate(q.triple, rows[i], "");
          if (valid && t) removals.emplace_back(graph, *t);
        }
        for (const auto& q : op.insertQuads) {
          bool valid;
          auto graph = quadGraph(q, rows[i], op.withGraph, valid);
          auto t = instantiate(q.triple, rows[i], scope + std::to_string(i) + "_");
          if (valid && t) additions.emplace_back(graph, *t);
        }
      }
      for (const auto& [graph, t] : removals) {
        if (!graph) {
          data.defaultGraph.erase(t);
        } else if (auto it = data.namedGraphs.find(*graph); it != data.namedGraphs.end()) {
          it->second.erase(t);
        }
      }
      for (const auto& [graph, t] : additions) targetGraph(data, graph).insert(t);
      break;
    }
    case Kind::Clear:
    case Kind::Drop:
      switch (op.target) {
        case UpdateOp::Target::Default:
          data.defaultGraph.clear();
          break;
        case UpdateOp::Target::Graph:
          data.namedGraphs.erase(op.graphIri);
          break;
        case UpdateOp::Target::Named:
          data.namedGraphs.clear();
          break;
        case UpdateOp::Target::All:
          data.defaultGraph.clear();
          data.namedGraphs.clear();
          break;
      }
      break;
    case Kind::Create:
      break;
  }
  std::erase_if(data.namedGraphs, [](const auto& kv) { return kv.second.empty(); });
}

nlohmann::json termJson(const Term& t) {
  nlohmann::json j;
  if (t.isIri()) {
    j = {{"type", "uri"}, {"value", t.value}};
  } else if (t.isBlank()) {
    j = {{"type", "bnode"}, {"value", t.value}};
  } else {
    j = {{"type", "literal"}, {"value", t.value}};
    if (!t.language.empty()) j["xml:lang"] = t.language;
    if (!t.datatype.empty()) j["datatype"] = t.datatype;
  }
  return j;
}

}  // namespace

// ____________________________________________________________________________
QueryResult evaluate(const Query& query, const rdf::Dataset& data,
                     const DatasetSpec& spec) {
  Evaluator ev(queryDataset(query, data, spec));
  auto active = activeDefault(ev.dataset());
  QueryResult result;
  result.form = query.form;
  switch (query.form) {
    case QueryForm::Select:
      result.select = ev.select(query, active);
      break;
    case QueryForm::Ask:
      result.boolean = !ev.group(query.where, active, {Binding{}}).empty();
      break;
    case QueryForm::Construct: {
      auto rows = ev.solutions(query, active);
      Evaluator::slice(rows, query);
      auto scope = rdf::freshBlankScope();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& tp : query.constructTemplate) {
          if (auto t = instantiate(tp, rows[i], scope + std::to_string(i) + "_")) {
            result.graph.insert(*t);
          }
        }
      }
      break;
    }
  }
  return result;
}

// ____________________________________________________________________________
void applyUpdate(const std::vector<UpdateOp>& ops, rdf::Dataset& data) {
  for (const auto& op : ops) applyOne(op, data);
}

// ____________________________________________________________________________
nlohmann::json toResultsJson(const QueryResult& result) {
  if (result.form == QueryForm::Ask) {
    return {{"head", nlohmann::json::object()}, {"boolean", result.boolean}};
  }
  nlohmann::json bindings = nlohmann::json::array();
  for (const auto& row : result.select.rows) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : row) j[k] = termJson(v);
    bindings.push_back(std::move(j));
  }
  return {{"head", {{"vars", result.select.variables}}},
          {"results", {{"bindings", std::move(bindings)}}}};
}

// ____________________________________________________________________________
QueryResult Store::query(std::string_view text, const DatasetSpec& spec) const {
  auto parsed = parseQuery(text);
  std::shared_lock lock(mutex_);
  return evaluate(parsed, data_, spec);
}

// ____________________________________________________________________________
void Store::update(std::string_view text) {
  auto ops = parseUpdate(text);
  std::unique_lock lock(mutex_);
  rdf::Dataset working = data_;
  applyUpdate(ops, working);
  data_ = std::move(working);
}

// ____________________________________________________________________________
void Store::load(const rdf::Dataset& data) {
  std::unique_lock lock(mutex_);
  data_.defaultGraph.merge(data.defaultGraph);
  for (const auto& [iri, g] : data.namedGraphs) {
    if (!g.empty()) data_.namedGraphs[iri].merge(g);
  }
}

// ____________________________________________________________________________
rdf::Dataset Store::snapshot() const {
  std::shared_lock lock(mutex_);
  return data_;
}

// ____________________________________________________________________________
std::map<std::string, std::size_t> Store::graphSizes() const {
  std::shared_lock lock(mutex_);
  std::map<std::string, std::size_t> sizes{{"", data_.defaultGraph.size()}};
  for (const auto& [iri, g] : data_.namedGraphs) sizes[iri] = g.size();
  return sizes;
}

}  // namespace ontoapi::sparql
