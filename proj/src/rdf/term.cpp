#include "ontoapi/rdf/term.h"

#include <algorithm>
#include <cctype>

#include "ontoapi/rdf/vocab.h"

namespace ontoapi::rdf {

// ____________________________________________________________________________
Term Term::iri(std::string iri) {
  return Term{TermKind::Iri, std::move(iri), {}, {}};
}

// ____________________________________________________________________________
Term Term::blank(std::string label) {
  return Term{TermKind::Blank, std::move(label), {}, {}};
}

// ____________________________________________________________________________
Term Term::literal(std::string lexical, std::string_view datatype) {
  Term term{TermKind::Literal, std::move(lexical), {}, {}};
  if (datatype != vocab::kXsdString) term.datatype = std::string(datatype);
  return term;
}

// ____________________________________________________________________________
Term Term::langLiteral(std::string lexical, std::string_view language) {
  Term term{TermKind::Literal, std::move(lexical), {}, std::string(language)};
  std::ranges::transform(term.language, term.language.begin(),
                         [](unsigned char c) { return std::tolower(c); });
  return term;
}

// ____________________________________________________________________________
std::string Term::effectiveDatatype() const {
  if (!language.empty()) return std::string(vocab::kRdfLangString);
  if (datatype.empty()) return std::string(vocab::kXsdString);
  return datatype;
}

// ____________________________________________________________________________
std::string escapeString(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\b':
        out += "\\b";
        break;
      case '\f':
        out += "\\f";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          static constexpr char kHex[] = "0123456789ABCDEF";
          out += "\\u00";
          out += kHex[(c >> 4) & 0xF];
          out += kHex[c & 0xF];
        } else {
          out += c;
        }
    }
  }
  return out;
}

// ____________________________________________________________________________
bool isSafeIri(std::string_view iri) {
  if (iri.empty()) return false;
  return std::ranges::none_of(iri, [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' ||
           c == '}' || c == '|' || c == '^' || c == '`' || c == '\\';
  });
}

// ____________________________________________________________________________
std::string toNTriples(const Term& term) {
  switch (term.kind) {
    case TermKind::Iri:
      return "<" + term.value + ">";
    case TermKind::Blank:
      return "_:" + term.value;
    case TermKind::Literal: {
      std::string out = "\"" + escapeString(term.value) + "\"";
      if (!term.language.empty()) {
        out += "@" + term.language;
      } else if (!term.datatype.empty()) {
        out += "^^<" + term.datatype + ">";
      }
      return out;
    }
  }
  return {};
}

// ____________________________________________________________________________
std::string toNTriples(const Triple& triple) {
  return toNTriples(triple.subject) + " " + toNTriples(triple.predicate) + " " +
         toNTriples(triple.object) + " .";
}

// ____________________________________________________________________________
std::string localName(std::string_view iri) {
  if (auto hash = iri.rfind('#'); hash != std::string_view::npos &&
                                  hash + 1 < iri.size()) {
    return std::string(iri.substr(hash + 1));
  }
  std::string_view trimmed = iri;
  while (!trimmed.empty() && (trimmed.back() == '/' || trimmed.back() == '#')) {
    trimmed.remove_suffix(1);
  }
  if (auto slash = trimmed.rfind('/'); slash != std::string_view::npos) {
    return std::string(trimmed.substr(slash + 1));
  }
  if (auto colon = trimmed.rfind(':'); colon != std::string_view::npos) {
    return std::string(trimmed.substr(colon + 1));
  }
  return std::string(trimmed);
}

}  // namespace ontoapi::rdf
