#include <httplib.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ontoapi/ontology/model.h"

namespace ontoapi::ontology {

namespace {

std::string lowerExtension(const std::string& name) {
  auto path = name.substr(0, name.find_first_of("?#"));
  auto ext = std::filesystem::path(path).extension().string();
  std::ranges::transform(ext, ext.begin(),
                         [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

// ____________________________________________________________________________
Syntax syntaxFor(const std::string& name, const std::string& content) {
  auto ext = lowerExtension(name);
  if (ext == ".ttl" || ext == ".nt" || ext == ".trig" || ext == ".n3") {
    return Syntax::Turtle;
  }
  if (ext == ".owl" || ext == ".rdf" || ext == ".xml") return Syntax::RdfXml;
  auto start = content.find_first_not_of(" \t\r\n");
  if (start != std::string::npos && content[start] == '<' &&
      start + 1 < content.size() &&
      (content[start + 1] == '?' || content[start + 1] == '!' ||
       std::isalpha(static_cast<unsigned char>(content[start + 1])))) {
    // "<http://..." opens a Turtle IRI; XML opens with a tag name.
    auto close = content.find_first_of(" >:", start);
    if (close == std::string::npos || content[close] != ':' ||
        content.compare(close, 3, "://") != 0) {
      return Syntax::RdfXml;
    }
  }
  return Syntax::Turtle;
}

// ____________________________________________________________________________
SourceDocument readSource(const std::string& pathOrUrl) {
  SourceDocument document;
  document.name = pathOrUrl;
  if (pathOrUrl.starts_with("http://") || pathOrUrl.starts_with("https://")) {
    auto schemeEnd = pathOrUrl.find("://") + 3;
    auto pathStart = pathOrUrl.find('/', schemeEnd);
    std::string host = pathOrUrl.substr(0, pathStart);
    std::string path =
        pathStart == std::string::npos ? "/" : pathOrUrl.substr(pathStart);
    httplib::Client client(host);
    client.set_follow_location(true);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    auto response = client.Get(
        path, {{"Accept", "text/turtle, application/rdf+xml;q=0.9, */*;q=0.1"}});
    if (!response) {
      throw LoadError(pathOrUrl, 0,
                      "fetch failed: " + httplib::to_string(response.error()));
    }
    if (response->status != 200) {
      throw LoadError(pathOrUrl, 0,
                      "fetch failed with HTTP " + std::to_string(response->status));
    }
    document.content = response->body;
    auto contentType = response->get_header_value("Content-Type");
    if (contentType.find("turtle") != std::string::npos ||
        contentType.find("n-triples") != std::string::npos) {
      document.syntax = Syntax::Turtle;
    } else if (contentType.find("rdf+xml") != std::string::npos) {
      document.syntax = Syntax::RdfXml;
    } else {
      document.syntax = syntaxFor(pathOrUrl, document.content);
    }
    return document;
  }
  std::ifstream in(pathOrUrl, std::ios::binary);
  if (!in) throw LoadError(pathOrUrl, 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  document.content = buffer.str();
  document.syntax = syntaxFor(pathOrUrl, document.content);
  return document;
}

}  // namespace ontoapi::ontology
