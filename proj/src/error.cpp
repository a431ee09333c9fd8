#include "deltametry/error.hpp"

namespace deltametry {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::MissingInput: return "missing-input";
    case ErrorKind::MalformedId: return "malformed-id";
    case ErrorKind::EmptyCorpus: return "empty-corpus";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Orientation: return "orientation";
    case ErrorKind::EmptyTable: return "empty-table";
    case ErrorKind::ModelMismatch: return "model-mismatch";
    case ErrorKind::Lookup: return "lookup";
    case ErrorKind::UnknownCandidate: return "unknown-candidate";
    case ErrorKind::DegenerateDocument: return "degenerate-document";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::DegenerateSetup: return "degenerate-setup";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace deltametry
