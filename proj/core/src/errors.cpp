#include "docroute/errors.hpp"

namespace docroute {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kEmptyDocument: return "empty-document";
    case ErrorKind::kEmptyCorpus: return "empty-corpus";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kDuplicateId: return "duplicate-id";
    case ErrorKind::kNotFound: return "not-found";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kProviderUnavailable: return "provider-unavailable";
    case ErrorKind::kProtocol: return "protocol";
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kBadMagic: return "bad-magic";
    case ErrorKind::kVersionMismatch: return "version-mismatch";
    case ErrorKind::kChecksum: return "checksum";
    case ErrorKind::kInvariantViolation: return "invariant-violation";
    case ErrorKind::kEvalSet: return "evalset";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace docroute
