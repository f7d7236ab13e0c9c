#include "ontoapi/rdf/lexer.h"

#include <algorithm>
#include <cctype>

namespace ontoapi::rdf {

namespace {

bool isNameStart(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalpha(u) || c == '_' || u >= 0x80;
}

bool isNameChar(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '-' || u >= 0x80;
}

bool isVarChar(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || u >= 0x80;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

// ____________________________________________________________________________
void appendUtf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// ____________________________________________________________________________
bool Token::isKeyword(std::string_view keyword) const {
  return type == TokenType::Word && iequals(text, keyword);
}

// ____________________________________________________________________________
const Token& Lexer::peek() {
  if (buffered_ == 0) {
    lookahead_[0] = scan();
    buffered_ = 1;
  }
  return lookahead_[0];
}

// ____________________________________________________________________________
const Token& Lexer::peekSecond() {
  peek();
  if (buffered_ == 1) {
    lookahead_[1] = scan();
    buffered_ = 2;
  }
  return lookahead_[1];
}

// ____________________________________________________________________________
Token Lexer::next() {
  peek();
  Token result = std::move(lookahead_[0]);
  if (buffered_ == 2) lookahead_[0] = std::move(lookahead_[1]);
  --buffered_;
  return result;
}

// ____________________________________________________________________________
void Lexer::skipWhitespaceAndComments() {
  while (pos_ < input_.size()) {
    char c = input_[pos_];
    if (c == '\n') {
      ++line_;
      ++pos_;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos_;
    } else if (c == '#') {
      while (pos_ < input_.size() && input_[pos_] != '\n') ++pos_;
    } else {
      break;
    }
  }
}

// ____________________________________________________________________________
bool Lexer::looksLikeIri() const {
  for (std::size_t i = pos_ + 1; i < input_.size(); ++i) {
    char c = input_[i];
    if (c == '>') return true;
    auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' ||
        c == '|' || c == '^' || c == '`') {
      return false;
    }
  }
  return false;
}

// ____________________________________________________________________________
Token Lexer::scan() {
  skipWhitespaceAndComments();
  Token token;
  token.line = line_;
  if (pos_ >= input_.size()) return token;

  char c = input_[pos_];
  if (c == '<' && looksLikeIri()) return scanIri();
  if (c == '"' || c == '\'') return scanString();
  if (std::isdigit(static_cast<unsigned char>(c)) ||
      (c == '.' && std::isdigit(static_cast<unsigned char>(at(1))))) {
    return scanNumber();
  }
  if ((c == '+' || c == '-') && options_.signedNumbers &&
      (std::isdigit(static_cast<unsigned char>(at(1))) ||
       (at(1) == '.' && std::isdigit(static_cast<unsigned char>(at(2)))))) {
    return scanNumber();
  }
  if ((c == '?' || c == '$') && isVarChar(at(1))) {
    ++pos_;
    std::size_t start = pos_;
    while (pos_ < input_.size() && isVarChar(input_[pos_])) ++pos_;
    token.type = TokenType::Variable;
    token.text = std::string(input_.substr(start, pos_ - start));
    return token;
  }
  if (c == '_' && at(1) == ':') {
    pos_ += 2;
    std::size_t start = pos_;
    while (pos_ < input_.size() &&
           (isNameChar(input_[pos_]) ||
            (input_[pos_] == '.' && isNameChar(at(1))))) {
      ++pos_;
    }
    token.type = TokenType::BlankLabel;
    token.text = std::string(input_.substr(start, pos_ - start));
    if (token.text.empty()) throw SyntaxError("empty blank node label", line_);
    return token;
  }
  if (c == '@') {
    ++pos_;
    std::size_t start = pos_;
    while (pos_ < input_.size() &&
           (std::isalnum(static_cast<unsigned char>(input_[pos_])) ||
            input_[pos_] == '-')) {
      ++pos_;
    }
    std::string tag(input_.substr(start, pos_ - start));
    if (tag.empty()) throw SyntaxError("empty language tag", line_);
    if (tag == "prefix" || tag == "base") {
      token.type = TokenType::Word;
      token.text = "@" + tag;
      return token;
    }
    std::ranges::transform(tag, tag.begin(),
                           [](unsigned char ch) { return std::tolower(ch); });
    token.type = TokenType::LangTag;
    token.text = std::move(tag);
    return token;
  }
  if (isNameStart(c) || c == ':') return scanName();

  token.type = TokenType::Punct;
  auto two = input_.substr(pos_, 2);
  for (std::string_view p : {"^^", "!=", "<=", ">=", "&&", "||"}) {
    if (two == p) {
      token.text = std::string(p);
      pos_ += 2;
      return token;
    }
  }
  static constexpr std::string_view kSingle = "{}()[].,;=<>!+-*/|^";
  if (kSingle.find(c) != std::string_view::npos) {
    token.text = std::string(1, c);
    ++pos_;
    return token;
  }
  throw SyntaxError(std::string("unexpected character '") + c + "'", line_);
}

// ____________________________________________________________________________
Token Lexer::scanIri() {
  Token token;
  token.line = line_;
  token.type = TokenType::IriRef;
  ++pos_;
  while (pos_ < input_.size() && input_[pos_] != '>') {
    char c = input_[pos_];
    if (c == '\\' && (at(1) == 'u' || at(1) == 'U')) {
      std::size_t digits = at(1) == 'u' ? 4 : 8;
      auto hex = input_.substr(pos_ + 2, digits);
      if (hex.size() != digits) throw SyntaxError("bad IRI escape", line_);
      appendUtf8(token.text, std::stoul(std::string(hex), nullptr, 16));
      pos_ += 2 + digits;
      continue;
    }
    token.text += c;
    ++pos_;
  }
  if (pos_ >= input_.size()) throw SyntaxError("unterminated IRI", line_);
  ++pos_;
  return token;
}

// ____________________________________________________________________________
Token Lexer::scanString() {
  Token token;
  token.line = line_;
  token.type = TokenType::String;
  char quote = input_[pos_];
  bool isLong = at(1) == quote && at(2) == quote;
  pos_ += isLong ? 3 : 1;
  while (true) {
    if (pos_ >= input_.size()) throw SyntaxError("unterminated string", token.line);
    char c = input_[pos_];
    if (isLong) {
      if (c == quote && at(1) == quote && at(2) == quote) {
        pos_ += 3;
        // A long string may end with extra quotes: """a"""" ends with a quote.
        while (at(0) == quote && at(1) != quote) {
          token.text += quote;
          ++pos_;
        }
        break;
      }
    } else if (c == quote) {
      ++pos_;
      break;
    } else if (c == '\n' || c == '\r') {
      throw SyntaxError("newline in short string", line_);
    }
    if (c == '\\') {
      char e = at(1);
      pos_ += 2;
      switch (e) {
        case 't': token.text += '\t'; break;
        case 'b': token.text += '\b'; break;
        case 'n': token.text += '\n'; break;
        case 'r': token.text += '\r'; break;
        case 'f': token.text += '\f'; break;
        case '"': token.text += '"'; break;
        case '\'': token.text += '\''; break;
        case '\\': token.text += '\\'; break;
        case 'u':
        case 'U': {
          std::size_t digits = e == 'u' ? 4 : 8;
          auto hex = input_.substr(pos_, digits);
          if (hex.size() != digits ||
              !std::ranges::all_of(hex, [](char h) {
                return std::isxdigit(static_cast<unsigned char>(h));
              })) {
            throw SyntaxError("bad unicode escape", line_);
          }
          appendUtf8(token.text, std::stoul(std::string(hex), nullptr, 16));
          pos_ += digits;
          break;
        }
        default:
          throw SyntaxError(std::string("bad string escape \\") + e, line_);
      }
      continue;
    }
    if (c == '\n') ++line_;
    token.text += c;
    ++pos_;
  }
  return token;
}

// ____________________________________________________________________________
Token Lexer::scanNumber() {
  Token token;
  token.line = line_;
  std::size_t start = pos_;
  if (input_[pos_] == '+' || input_[pos_] == '-') ++pos_;
  auto digit = [&](std::size_t offset) {
    return std::isdigit(static_cast<unsigned char>(at(offset)));
  };
  while (digit(0)) ++pos_;
  token.type = TokenType::Integer;
  if (at(0) == '.' && digit(1)) {
    ++pos_;
    while (digit(0)) ++pos_;
    token.type = TokenType::Decimal;
  }
  if (at(0) == 'e' || at(0) == 'E') {
    std::size_t save = pos_;
    ++pos_;
    if (at(0) == '+' || at(0) == '-') ++pos_;
    if (digit(0)) {
      while (digit(0)) ++pos_;
      token.type = TokenType::Double;
    } else {
      pos_ = save;
    }
  }
  token.text = std::string(input_.substr(start, pos_ - start));
  return token;
}

// ____________________________________________________________________________
std::string Lexer::scanLocalPart() {
  std::string local;
  while (pos_ < input_.size()) {
    char c = input_[pos_];
    if (isNameChar(c) || c == ':') {
      local += c;
      ++pos_;
    } else if (c == '.' && (isNameChar(at(1)) || at(1) == ':')) {
      local += c;
      ++pos_;
    } else if (c == '%' && std::isxdigit(static_cast<unsigned char>(at(1))) &&
               std::isxdigit(static_cast<unsigned char>(at(2)))) {
      local += input_.substr(pos_, 3);
      pos_ += 3;
    } else if (c == '\\' && at(1) != '\0' &&
               std::string_view("_~.-!$&'()*+,;=/?#@%").find(at(1)) !=
                   std::string_view::npos) {
      local += at(1);
      pos_ += 2;
    } else {
      break;
    }
  }
  return local;
}

// ____________________________________________________________________________
Token Lexer::scanName() {
  Token token;
  token.line = line_;
  std::size_t start = pos_;
  while (pos_ < input_.size() &&
         (isNameChar(input_[pos_]) ||
          (input_[pos_] == '.' && isNameChar(at(1))))) {
    ++pos_;
  }
  std::string word(input_.substr(start, pos_ - start));
  if (at(0) == ':') {
    ++pos_;
    token.type = TokenType::PrefixedName;
    token.prefix = std::move(word);
    token.text = scanLocalPart();
    return token;
  }
  token.type = TokenType::Word;
  token.text = std::move(word);
  return token;
}

}  // namespace ontoapi::rdf
