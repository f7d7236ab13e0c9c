#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ontoapi {

// Non-fatal diagnostics collected by the compiler and the framing code.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input documents could not be read or parsed.
class LoadError : public std::runtime_error {
 public:
  LoadError(std::string document, std::size_t line, const std::string& message)
      : std::runtime_error(document + (line ? ":" + std::to_string(line) : "") +
                           ": " + message),
        document_(std::move(document)),
        line_(line) {}
  const std::string& document() const { return document_; }
  std::size_t line() const { return line_; }

 private:
  std::string document_;
  std::size_t line_;
};

// The extracted model violates an invariant (e.g. duplicate local names).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ontoapi
