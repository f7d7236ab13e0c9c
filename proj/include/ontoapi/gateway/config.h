#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ontoapi::gateway {

enum class AuthMode { None, StaticToken };
enum class ReadScope { AllGraphs, OwnGraph };

struct GatewayConfig {
  std::string endpointQueryUrl;
  std::string endpointUpdateUrl;
  std::string instancePrefix;
  std::string graphBase;
  std::string defaultGraph;
  AuthMode authMode = AuthMode::None;
  std::map<std::string, std::string> tokens;  // token -> username
  ReadScope readScope = ReadScope::AllGraphs;
  std::optional<std::filesystem::path> customQueryDir;
  std::filesystem::path artifactsDir;
  std::string host = "127.0.0.1";
  int port = 8080;
};

// Lists every problem found, one per line, each naming the key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Relative paths (artifacts, custom_queries) resolve against `baseDir`;
// `artifacts` defaults to it.
GatewayConfig parseConfig(const std::string& yamlText,
                          const std::filesystem::path& baseDir);
GatewayConfig loadConfig(const std::filesystem::path& file);

}  // namespace ontoapi::gateway
