#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ontoapi/compiler/api_spec.h"

namespace ontoapi::cli {

enum class CheckStatus { Pass, FailHttp, FailSchema, SkipEmpty };

std::string_view toString(CheckStatus status);

struct RouteResult {
  std::string route;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;

  bool operator==(const RouteResult&) const = default;
};

struct ConformanceReport {
  std::vector<RouteResult> perRoute;  // in route order

  std::size_t count(CheckStatus status) const;
  bool ok() const { return count(CheckStatus::FailHttp) + count(CheckStatus::FailSchema) == 0; }
};

// The server did not answer at all.
class UnreachableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// GETs every GET route of the spec and validates the bodies against their
// response schemas. Item routes use the first id of their collection; routes
// that need query parameters are skipped. Throws UnreachableError when the
// server cannot be contacted.
ConformanceReport runConformance(const std::string& baseUrl,
                                 const compiler::ApiSpecDocument& spec,
                                 int concurrency = 8, int timeoutSeconds = 30);

// One JSON object per line: {"route", "status", "detail"}.
std::string toJsonLines(const ConformanceReport& report);
// Aligned table followed by a totals line.
std::string toTable(const ConformanceReport& report);

}  // namespace ontoapi::cli
