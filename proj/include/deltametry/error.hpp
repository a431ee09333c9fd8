#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace deltametry {

/// Failure categories. The CLI maps each one onto a process exit code.
enum class ErrorKind {
  Usage,
  MissingInput,
  MalformedId,
  EmptyCorpus,
  Parse,
  Orientation,
  EmptyTable,
  ModelMismatch,
  Lookup,
  UnknownCandidate,
  DegenerateDocument,
  InsufficientData,
  DegenerateSetup,
  Dimension,
  InvalidInput,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace deltametry
