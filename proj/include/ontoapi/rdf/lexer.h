#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ontoapi::rdf {

// Raised by the Turtle/TriG, RDF/XML and SPARQL readers.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class TokenType {
  End,
  IriRef,
  PrefixedName,
  BlankLabel,
  Variable,
  String,
  LangTag,
  Integer,
  Decimal,
  Double,
  Punct,
  Word,
};

struct Token {
  TokenType type = TokenType::End;
  std::string text;    // decoded value (IRI, string contents, word, ...)
  std::string prefix;  // PrefixedName only
  std::size_t line = 1;

  bool isPunct(std::string_view p) const {
    return type == TokenType::Punct && text == p;
  }
  // Case-insensitive keyword match on Word tokens.
  bool isKeyword(std::string_view keyword) const;
};

// Tokenizer shared by the Turtle and SPARQL readers. Comments are skipped.
class Lexer {
 public:
  struct Options {
    // Turtle numerals may carry a leading sign; SPARQL treats +/- as
    // operators.
    bool signedNumbers = false;
  };

  explicit Lexer(std::string_view input) : Lexer(input, Options{}) {}
  Lexer(std::string_view input, Options options)
      : input_(input), options_(options) {}

  const Token& peek();
  const Token& peekSecond();
  Token next();
  std::size_t line() const { return line_; }

 private:
  Token scan();
  void skipWhitespaceAndComments();
  Token scanIri();
  Token scanString();
  Token scanNumber();
  Token scanName();
  std::string scanLocalPart();
  bool looksLikeIri() const;
  char at(std::size_t offset) const {
    return pos_ + offset < input_.size() ? input_[pos_ + offset] : '\0';
  }

  std::string_view input_;
  Options options_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  Token lookahead_[2];
  int buffered_ = 0;
};

// Appends the UTF-8 encoding of a code point.
void appendUtf8(std::string& out, unsigned long codePoint);

}  // namespace ontoapi::rdf
