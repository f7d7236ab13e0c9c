#include "ontoapi/gateway/config.h"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace ontoapi::gateway {

namespace {

std::string joinLines(const std::vector<std::string>& issues) {
  std::string out = "invalid configuration:";
  for (const auto& issue : issues) out += "\n  " + issue;
  return out;
}

bool endsWithSeparator(const std::string& iri) {
  return !iri.empty() && (iri.back() == '/' || iri.back() == '#');
}

bool isHttpUrl(const std::string& url) {
  static const std::regex pattern(R"(https?://[^\s/]+(/\S*)?)");
  return std::regex_match(url, pattern);
}

bool isAbsolute(const std::string& iri) {
  static const std::regex pattern(R"([A-Za-z][A-Za-z0-9+.-]*:[^\s<>"{}|\\^`]*)");
  return std::regex_match(iri, pattern);
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>& issues) : issues_(issues) {}

  std::optional<std::string> scalar(const YAML::Node& node, const std::string& key,
                                    bool required) {
    if (!node || node.IsNull()) {
      if (required) issues_.push_back(key + ": required");
      return std::nullopt;
    }
    if (!node.IsScalar()) {
      issues_.push_back(key + ": expected a string");
      return std::nullopt;
    }
    return node.Scalar();
  }

  void unknownKeys(const YAML::Node& map, const std::set<std::string>& allowed,
                   const std::string& prefix) {
    for (const auto& kv : map) {
      auto key = kv.first.as<std::string>();
      if (!allowed.contains(key)) issues_.push_back(prefix + key + ": unknown key");
    }
  }

 private:
  std::vector<std::string>& issues_;
};

}  // namespace

// ____________________________________________________________________________
ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(joinLines(issues)), issues_(std::move(issues)) {}

// ____________________________________________________________________________
GatewayConfig parseConfig(const std::string& yamlText,
                          const std::filesystem::path& baseDir) {
  YAML::Node root;
  try {
    root = YAML::Load(yamlText);
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("not valid YAML: ") + e.what()});
  }
  if (!root.IsMap()) throw ConfigError({"top level must be a mapping"});

  std::vector<std::string> issues;
  Reader read(issues);
  GatewayConfig config;
  read.unknownKeys(root,
                   {"endpoint", "instance_prefix", "graph_base", "default_graph", "auth",
                    "read_scope", "custom_queries", "port", "host", "artifacts"},
                   "");

  const YAML::Node endpoint = root["endpoint"];
  if (!endpoint || !endpoint.IsMap()) {
    issues.push_back("endpoint: required mapping with 'query' and 'update'");
  } else {
    read.unknownKeys(endpoint, {"query", "update"}, "endpoint.");
    if (auto q = read.scalar(endpoint["query"], "endpoint.query", true)) {
      config.endpointQueryUrl = *q;
      if (!isHttpUrl(*q)) issues.push_back("endpoint.query: not an http(s) URL");
    }
    if (auto u = read.scalar(endpoint["update"], "endpoint.update", false)) {
      config.endpointUpdateUrl = *u;
      if (!isHttpUrl(*u)) issues.push_back("endpoint.update: not an http(s) URL");
    } else {
      config.endpointUpdateUrl = config.endpointQueryUrl;
    }
  }

  auto iriKey = [&](const char* key, std::string& out, bool separator) {
    if (auto v = read.scalar(root[key], key, true)) {
      out = *v;
      if (!isAbsolute(*v)) {
        issues.push_back(std::string(key) + ": not an absolute IRI");
      } else if (separator && !endsWithSeparator(*v)) {
        issues.push_back(std::string(key) + ": must end with '/' or '#'");
      }
    }
  };
  iriKey("instance_prefix", config.instancePrefix, true);
  iriKey("graph_base", config.graphBase, true);
  iriKey("default_graph", config.defaultGraph, false);

  if (const YAML::Node auth = root["auth"]) {
    if (!auth.IsMap()) {
      issues.push_back("auth: expected a mapping");
    } else {
      read.unknownKeys(auth, {"mode", "tokens"}, "auth.");
      auto mode = read.scalar(auth["mode"], "auth.mode", false).value_or("none");
      if (mode == "none") {
        config.authMode = AuthMode::None;
      } else if (mode == "static-token") {
        config.authMode = AuthMode::StaticToken;
      } else {
        issues.push_back("auth.mode: expected 'none' or 'static-token'");
      }
      const YAML::Node tokens = auth["tokens"];
      if (tokens && !tokens.IsNull()) {
        if (!tokens.IsMap()) {
          issues.push_back("auth.tokens: expected a mapping of token to username");
        } else {
          static const std::regex user("[A-Za-z0-9._~-]+");
          for (const auto& kv : tokens) {
            auto token = kv.first.as<std::string>();
            auto name = kv.second.IsScalar() ? kv.second.Scalar() : "";
            if (!std::regex_match(name, user)) {
              issues.push_back("auth.tokens." + token + ": invalid username");
            } else {
              config.tokens[token] = name;
            }
          }
        }
      }
      if (config.authMode == AuthMode::StaticToken && config.tokens.empty()) {
        issues.push_back("auth.tokens: static-token mode needs at least one token");
      }
    }
  }

  if (auto scope = read.scalar(root["read_scope"], "read_scope", false)) {
    if (*scope == "all-graphs") {
      config.readScope = ReadScope::AllGraphs;
    } else if (*scope == "own-graph") {
      config.readScope = ReadScope::OwnGraph;
    } else {
      issues.push_back("read_scope: expected 'all-graphs' or 'own-graph'");
    }
  }

  if (auto dir = read.scalar(root["custom_queries"], "custom_queries", false)) {
    config.customQueryDir = baseDir / *dir;
  }
  config.artifactsDir = baseDir;
  if (auto dir = read.scalar(root["artifacts"], "artifacts", false)) {
    config.artifactsDir = baseDir / *dir;
  }
  if (auto host = read.scalar(root["host"], "host", false)) config.host = *host;
  if (auto port = read.scalar(root["port"], "port", false)) {
    static const std::regex digits("[0-9]{1,5}");
    if (!std::regex_match(*port, digits) || std::stoi(*port) > 65535) {
      issues.push_back("port: expected an integer in 0..65535");
    } else {
      config.port = std::stoi(*port);
    }
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
  return config;
}

// ____________________________________________________________________________
GatewayConfig loadConfig(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError({file.string() + ": cannot read"});
  std::ostringstream text;
  text << in.rdbuf();
  auto base = file.parent_path();
  return parseConfig(text.str(), base.empty() ? std::filesystem::path(".") : base);
}

}  // namespace ontoapi::gateway
