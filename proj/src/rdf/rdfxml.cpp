#include "ontoapi/rdf/rdfxml.h"

#include <expat.h>

#include <memory>
#include <optional>
#include <vector>

#include "ontoapi/rdf/vocab.h"

namespace ontoapi::rdf {

namespace {

constexpr char kSeparator = ' ';
constexpr std::string_view kXmlNs = "http://www.w3.org/XML/1998/namespace";

std::string joinName(std::string_view expatName) {
  auto sep = expatName.find(kSeparator);
  if (sep == std::string_view::npos) return std::string(expatName);
  return std::string(expatName.substr(0, sep)) +
         std::string(expatName.substr(sep + 1));
}

std::string rdfName(std::string_view local) {
  return std::string(vocab::kRdf) + std::string(local);
}

bool isRdf(std::string_view iri, std::string_view local) {
  return iri.size() == vocab::kRdf.size() + local.size() &&
         iri.starts_with(vocab::kRdf) && iri.ends_with(local);
}

struct Attribute {
  std::string name;  // namespace IRI + local name
  std::string value;
};

enum class FrameKind { Node, Property, Literal };
enum class ParseType { None, Resource, Collection, Literal };

struct Frame {
  FrameKind kind = FrameKind::Node;
  std::string base;
  std::string language;
  // Node frames.
  Term subject;
  int liCounter = 0;
  // Property frames.
  Term predicate;
  Term owner;
  std::string datatype;
  std::string text;
  std::optional<Term> object;
  ParseType parseType = ParseType::None;
  std::vector<Term> collection;
  int literalDepth = 0;
};

class RdfXmlReader {
 public:
  RdfXmlReader(std::string_view base)
      : parser_(XML_ParserCreateNS(nullptr, kSeparator), &XML_ParserFree),
        base_(base),
        blankScope_(freshBlankScope()) {
    XML_SetUserData(parser_.get(), this);
    XML_SetElementHandler(parser_.get(), &RdfXmlReader::onStart,
                          &RdfXmlReader::onEnd);
    XML_SetCharacterDataHandler(parser_.get(), &RdfXmlReader::onText);
    XML_SetStartNamespaceDeclHandler(parser_.get(), &RdfXmlReader::onNamespace);
  }

  RdfDocument read(std::string_view text) {
    auto status = XML_Parse(parser_.get(), text.data(),
                            static_cast<int>(text.size()), XML_TRUE);
    if (error_) std::rethrow_exception(error_);
    if (status != XML_STATUS_OK) {
      throw SyntaxError(XML_ErrorString(XML_GetErrorCode(parser_.get())),
                        XML_GetCurrentLineNumber(parser_.get()));
    }
    return std::move(doc_);
  }

 private:
  static void onNamespace(void* self, const XML_Char* prefix,
                          const XML_Char* uri) {
    auto* reader = static_cast<RdfXmlReader*>(self);
    if (uri != nullptr) reader->doc_.prefixes[prefix ? prefix : ""] = uri;
  }

  static void onStart(void* self, const XML_Char* name, const XML_Char** atts) {
    auto* reader = static_cast<RdfXmlReader*>(self);
    if (reader->error_) return;
    try {
      std::vector<Attribute> attributes;
      for (int i = 0; atts[i] != nullptr; i += 2) {
        attributes.push_back({joinName(atts[i]), atts[i + 1]});
      }
      reader->start(joinName(name), attributes);
    } catch (...) {
      reader->error_ = std::current_exception();
      XML_StopParser(reader->parser_.get(), XML_FALSE);
    }
  }

  static void onEnd(void* self, const XML_Char* name) {
    auto* reader = static_cast<RdfXmlReader*>(self);
    if (reader->error_) return;
    try {
      reader->end(joinName(name));
    } catch (...) {
      reader->error_ = std::current_exception();
      XML_StopParser(reader->parser_.get(), XML_FALSE);
    }
  }

  static void onText(void* self, const XML_Char* text, int length) {
    auto* reader = static_cast<RdfXmlReader*>(self);
    if (reader->error_ || reader->stack_.empty()) return;
    auto& top = reader->stack_.back();
    if (top.kind == FrameKind::Property || top.kind == FrameKind::Literal) {
      top.text.append(text, static_cast<std::size_t>(length));
    }
  }

  [[noreturn]] void fail(const std::string& message) {
    throw SyntaxError(message, XML_GetCurrentLineNumber(parser_.get()));
  }

  void emit(Term s, Term p, Term o) {
    doc_.dataset.defaultGraph.insert(
        Triple{std::move(s), std::move(p), std::move(o)});
  }

  Term freshBlank() {
    return Term::blank(blankScope_ + "x" + std::to_string(counter_++));
  }

  Term nodeIdBlank(std::string_view id) {
    return Term::blank(blankScope_ + "n" + std::string(id));
  }

  std::string currentBase() const {
    return stack_.empty() ? base_ : stack_.back().base;
  }

  std::string currentLanguage() const {
    return stack_.empty() ? std::string() : stack_.back().language;
  }

  void start(const std::string& name, std::vector<Attribute>& attributes) {
    std::string base = currentBase();
    std::string language = currentLanguage();
    std::vector<Attribute> rest;
    for (auto& attr : attributes) {
      if (attr.name.starts_with(kXmlNs)) {
        auto local = std::string_view(attr.name).substr(kXmlNs.size());
        if (local == "base") base = resolveIri(base, attr.value);
        if (local == "lang") language = attr.value;
        continue;
      }
      rest.push_back(std::move(attr));
    }

    if (!stack_.empty() && stack_.back().kind == FrameKind::Literal) {
      auto& lit = stack_.back();
      lit.text += "<" + localOf(name) + ">";
      ++lit.literalDepth;
      return;
    }

    if (stack_.empty() && isRdf(name, "RDF")) {
      Frame root;
      root.kind = FrameKind::Node;
      root.base = base;
      root.language = language;
      root.subject = Term::iri("");  // marker: container, not a node
      inRdfRoot_ = true;
      stack_.push_back(std::move(root));
      rootIsContainer_ = true;
      return;
    }

    bool expectNode = stack_.empty() ||
                      (rootIsContainer_ && stack_.size() == 1) ||
                      stack_.back().kind == FrameKind::Property;
    if (expectNode) {
      startNode(name, rest, base, language);
    } else {
      startProperty(name, rest, base, language);
    }
  }

  static std::string localOf(std::string_view iri) {
    auto cut = iri.find_last_of("#/");
    return std::string(cut == std::string_view::npos ? iri : iri.substr(cut + 1));
  }

  void startNode(const std::string& name, std::vector<Attribute>& attributes,
                 const std::string& base, const std::string& language) {
    Term subject;
    bool hasSubject = false;
    std::vector<Attribute> properties;
    for (auto& attr : attributes) {
      if (isRdf(attr.name, "about")) {
        subject = Term::iri(resolveIri(base, attr.value));
        hasSubject = true;
      } else if (isRdf(attr.name, "ID")) {
        subject = Term::iri(resolveIri(base, "#" + attr.value));
        hasSubject = true;
      } else if (isRdf(attr.name, "nodeID")) {
        subject = nodeIdBlank(attr.value);
        hasSubject = true;
      } else {
        properties.push_back(std::move(attr));
      }
    }
    if (!hasSubject) subject = freshBlank();
    if (!isRdf(name, "Description")) {
      emit(subject, Term::iri(rdfName("type")), Term::iri(name));
    }
    for (auto& attr : properties) {
      if (isRdf(attr.name, "type")) {
        emit(subject, Term::iri(attr.name),
             Term::iri(resolveIri(base, attr.value)));
      } else {
        emit(subject, Term::iri(attr.name),
             language.empty() ? Term::literal(attr.value)
                              : Term::langLiteral(attr.value, language));
      }
    }
    if (!stack_.empty() && stack_.back().kind == FrameKind::Property) {
      auto& parent = stack_.back();
      if (parent.parseType == ParseType::Collection) {
        parent.collection.push_back(subject);
      } else {
        if (parent.object) fail("property element has more than one object");
        parent.object = subject;
      }
    }
    Frame frame;
    frame.kind = FrameKind::Node;
    frame.base = base;
    frame.language = language;
    frame.subject = std::move(subject);
    stack_.push_back(std::move(frame));
  }

  void startProperty(const std::string& name, std::vector<Attribute>& attributes,
                     const std::string& base, const std::string& language) {
    auto& owner = stack_.back();
    Frame frame;
    frame.kind = FrameKind::Property;
    frame.base = base;
    frame.language = language;
    frame.owner = owner.subject;
    frame.predicate = Term::iri(isRdf(name, "li")
                                    ? rdfName("_" + std::to_string(++owner.liCounter))
                                    : name);
    std::optional<Term> resource;
    std::vector<Attribute> properties;
    for (auto& attr : attributes) {
      if (isRdf(attr.name, "resource")) {
        resource = Term::iri(resolveIri(base, attr.value));
      } else if (isRdf(attr.name, "nodeID")) {
        resource = nodeIdBlank(attr.value);
      } else if (isRdf(attr.name, "datatype")) {
        frame.datatype = resolveIri(base, attr.value);
      } else if (isRdf(attr.name, "parseType")) {
        if (attr.value == "Resource") {
          frame.parseType = ParseType::Resource;
        } else if (attr.value == "Collection") {
          frame.parseType = ParseType::Collection;
        } else {
          frame.parseType = ParseType::Literal;
        }
      } else if (isRdf(attr.name, "ID")) {
        // Reification is not supported; the statement itself is kept.
      } else {
        properties.push_back(std::move(attr));
      }
    }
    if (!properties.empty() && !resource) resource = freshBlank();
    for (auto& attr : properties) {
      if (isRdf(attr.name, "type")) {
        emit(*resource, Term::iri(attr.name),
             Term::iri(resolveIri(base, attr.value)));
      } else {
        emit(*resource, Term::iri(attr.name),
             language.empty() ? Term::literal(attr.value)
                              : Term::langLiteral(attr.value, language));
      }
    }
    if (resource) frame.object = resource;
    stack_.push_back(std::move(frame));

    if (stack_.back().parseType == ParseType::Resource) {
      Term node = freshBlank();
      stack_.back().object = node;
      Frame nodeFrame;
      nodeFrame.kind = FrameKind::Node;
      nodeFrame.base = base;
      nodeFrame.language = language;
      nodeFrame.subject = node;
      nodeFrame.literalDepth = -1;  // implicit node: closes with its property
      stack_.push_back(std::move(nodeFrame));
    } else if (stack_.back().parseType == ParseType::Literal) {
      stack_.back().kind = FrameKind::Literal;
    }
  }

  void end(const std::string& name) {
    if (stack_.empty()) return;
    auto& top = stack_.back();
    if (top.kind == FrameKind::Literal && top.literalDepth > 0) {
      top.text += "</" + localOf(name) + ">";
      --top.literalDepth;
      return;
    }
    if (top.kind == FrameKind::Node && top.literalDepth == -1) {
      // parseType="Resource": pop the implicit node, then the property.
      stack_.pop_back();
    }
    Frame frame = std::move(stack_.back());
    stack_.pop_back();
    if (frame.kind == FrameKind::Node) return;
    finishProperty(frame);
  }

  void finishProperty(Frame& frame) {
    if (frame.kind == FrameKind::Literal) {
      emit(frame.owner, frame.predicate,
           Term::literal(frame.text, vocab::kRdfXmlLiteral));
      return;
    }
    if (frame.parseType == ParseType::Collection) {
      Term head = Term::iri(std::string(vocab::kRdfNil));
      for (auto it = frame.collection.rbegin(); it != frame.collection.rend();
           ++it) {
        Term cell = freshBlank();
        emit(cell, Term::iri(std::string(vocab::kRdfFirst)), *it);
        emit(cell, Term::iri(std::string(vocab::kRdfRest)), head);
        head = cell;
      }
      emit(frame.owner, frame.predicate, head);
      return;
    }
    if (frame.object) {
      emit(frame.owner, frame.predicate, *frame.object);
      return;
    }
    if (!frame.datatype.empty()) {
      emit(frame.owner, frame.predicate,
           Term::literal(frame.text, frame.datatype));
    } else if (!frame.language.empty()) {
      emit(frame.owner, frame.predicate,
           Term::langLiteral(frame.text, frame.language));
    } else {
      emit(frame.owner, frame.predicate, Term::literal(frame.text));
    }
  }

  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser_;
  std::string base_;
  std::string blankScope_;
  RdfDocument doc_;
  std::vector<Frame> stack_;
  bool inRdfRoot_ = false;
  bool rootIsContainer_ = false;
  unsigned long counter_ = 0;
  std::exception_ptr error_;
};

}  // namespace

// ____________________________________________________________________________
RdfDocument parseRdfXml(std::string_view text, std::string_view baseIri) {
  return RdfXmlReader(baseIri).read(text);
}

}  // namespace ontoapi::rdf
