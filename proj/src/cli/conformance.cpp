#include "ontoapi/cli/conformance.h"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <regex>
#include <thread>

#include <nlohmann/json.hpp>

#include "ontoapi/compiler/validation.h"

namespace ontoapi::cli {

using compiler::ApiSpecDocument;
using nlohmann::json;

namespace {

struct Target {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing '/'
};

Target parseBase(const std::string& baseUrl) {
  static const std::regex pattern(R"((https?://[^/]+)(/.*)?)");
  std::smatch m;
  if (!std::regex_match(baseUrl, m, pattern)) {
    throw UnreachableError("not an http(s) URL: " + baseUrl);
  }
  std::string prefix = m[2].str();
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {m[1].str(), prefix};
}

std::string percentEncode(const std::string& text) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

class Checker {
 public:
  Checker(const Target& target, const ApiSpecDocument& spec, int timeoutSeconds)
      : target_(target), spec_(spec), client_(target.origin) {
    client_.set_connection_timeout(timeoutSeconds);
    client_.set_read_timeout(timeoutSeconds);
  }

  RouteResult check(const std::string& route, const compiler::OperationSpec& op) {
    RouteResult result{.route = route};
    auto ok = op.responses.find("200");
    if (ok == op.responses.end() || !ok->second.schemaRef ||
        !spec_.schemas.contains(*ok->second.schemaRef)) {
      return skip(result, "no 200 response schema");
    }
    const auto& schema = spec_.schemas.at(*ok->second.schemaRef);
    std::vector<std::string> required;
    for (const auto& p : op.parameters) {
      if (p.required && p.in == "query") required.push_back(p.name);
    }
    if (!required.empty()) {
      std::string names;
      for (const auto& n : required) names += (names.empty() ? "" : ", ") + n;
      return skip(result, "requires query parameters: " + names);
    }

    std::string path = route;
    auto placeholder = route.find("{id}");
    if (placeholder != std::string::npos) {
      std::string collection = route.substr(0, placeholder);
      while (collection.size() > 1 && collection.back() == '/') collection.pop_back();
      auto list = get(collection + "?per_page=1");
      if (!list) return fail(result, CheckStatus::FailHttp, "collection request failed");
      if (list->status != 200) {
        return fail(result, CheckStatus::FailHttp,
                    "collection returned HTTP " + std::to_string(list->status));
      }
      json body = json::parse(list->body, nullptr, false);
      if (!body.is_array() || (!body.empty() && !body[0].contains("id"))) {
        return fail(result, CheckStatus::FailSchema, "collection body has no ids");
      }
      if (body.empty()) return skip(result, "no instances");
      const json& id = body[0]["id"];
      if (!id.is_string()) return fail(result, CheckStatus::FailSchema, "id: expected string");
      path.replace(placeholder, 4, percentEncode(id.get<std::string>()));
    }

    auto response = get(path);
    if (!response) return fail(result, CheckStatus::FailHttp, "request failed");
    if (response->status != 200) {
      return fail(result, CheckStatus::FailHttp, "HTTP " + std::to_string(response->status));
    }
    json body = json::parse(response->body, nullptr, false);
    if (body.is_discarded()) return fail(result, CheckStatus::FailSchema, "body is not JSON");

    std::vector<compiler::ValidationIssue> issues;
    if (ok->second.isArray) {
      if (!body.is_array()) return fail(result, CheckStatus::FailSchema, "expected an array");
      for (std::size_t i = 0; i < body.size() && issues.empty(); ++i) {
        issues = compiler::validateResource(body[i], schema, spec_.schemas, true,
                                            "[" + std::to_string(i) + "]");
      }
    } else {
      issues = compiler::validateResource(body, schema, spec_.schemas, true);
    }
    if (!issues.empty()) {
      return fail(result, CheckStatus::FailSchema, compiler::toString(issues.front()));
    }
    result.detail = ok->second.isArray ? std::to_string(body.size()) + " items" : path;
    return result;
  }

 private:
  httplib::Result get(const std::string& path) {
    return client_.Get(target_.prefix + path, {{"Accept", "application/json"}});
  }
  static RouteResult skip(RouteResult r, std::string detail) {
    r.status = CheckStatus::SkipEmpty;
    r.detail = std::move(detail);
    return r;
  }
  static RouteResult fail(RouteResult r, CheckStatus status, std::string detail) {
    r.status = status;
    r.detail = std::move(detail);
    return r;
  }

  const Target& target_;
  const ApiSpecDocument& spec_;
  httplib::Client client_;
};

}  // namespace

// ____________________________________________________________________________
std::string_view toString(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::FailHttp:
      return "fail-http";
    case CheckStatus::FailSchema:
      return "fail-schema";
    case CheckStatus::SkipEmpty:
      return "skip-empty";
  }
  return "?";
}

// ____________________________________________________________________________
std::size_t ConformanceReport::count(CheckStatus status) const {
  return std::count_if(perRoute.begin(), perRoute.end(),
                       [&](const RouteResult& r) { return r.status == status; });
}

// ____________________________________________________________________________
ConformanceReport runConformance(const std::string& baseUrl, const ApiSpecDocument& spec,
                                 int concurrency, int timeoutSeconds) {
  Target target = parseBase(baseUrl);
  {
    httplib::Client probe(target.origin);
    probe.set_connection_timeout(timeoutSeconds);
    if (!probe.Get(target.prefix + "/")) {
      throw UnreachableError("cannot reach " + baseUrl);
    }
  }

  std::vector<std::pair<std::string, const compiler::OperationSpec*>> tasks;
  for (const auto& [route, item] : spec.paths) {
    if (auto get = item.operations.find("get"); get != item.operations.end()) {
      tasks.emplace_back(route, &get->second);
    }
  }
  ConformanceReport report;
  report.perRoute.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    Checker checker(target, spec, timeoutSeconds);
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      report.perRoute[i] = checker.check(tasks[i].first, *tasks[i].second);
    }
  };
  std::size_t workers = std::clamp<std::size_t>(concurrency, 1, std::max<std::size_t>(1, tasks.size()));
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return report;
}

// ____________________________________________________________________________
std::string toJsonLines(const ConformanceReport& report) {
  std::string out;
  for (const auto& r : report.perRoute) {
    out += json{{"route", r.route}, {"status", toString(r.status)}, {"detail", r.detail}}.dump(
               -1, ' ', false, json::error_handler_t::replace) +
           "\n";
  }
  return out;
}

// ____________________________________________________________________________
std::string toTable(const ConformanceReport& report) {
  std::size_t width = 5;
  for (const auto& r : report.perRoute) width = std::max(width, r.route.size());
  auto pad = [](std::string s, std::size_t n) {
    s.resize(std::max(n, s.size()), ' ');
    return s;
  };
  std::string out = pad("ROUTE", width) + "  " + pad("STATUS", 11) + "  DETAIL\n";
  for (const auto& r : report.perRoute) {
    out += pad(r.route, width) + "  " + pad(std::string(toString(r.status)), 11) + "  " +
           r.detail + "\n";
  }
  out += std::to_string(report.perRoute.size()) + " routes: " +
         std::to_string(report.count(CheckStatus::Pass)) + " pass, " +
         std::to_string(report.count(CheckStatus::FailHttp)) + " fail-http, " +
         std::to_string(report.count(CheckStatus::FailSchema)) + " fail-schema, " +
         std::to_string(report.count(CheckStatus::SkipEmpty)) + " skip-empty\n";
  return out;
}

}  // namespace ontoapi::cli
