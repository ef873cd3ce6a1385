#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace docroute {

enum class ErrorKind {
  kInvalidArgument,
  kEmptyDocument,
  kEmptyCorpus,
  kParse,
  kDuplicateId,
  kNotFound,
  kIo,
  kProviderUnavailable,
  kProtocol,
  kDimensionMismatch,
  kConfig,
  kBadMagic,
  kVersionMismatch,
  kChecksum,
  kInvariantViolation,
  kEvalSet,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. The kind is stable and is what the
/// CLI maps onto exit codes; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the embedding layer after retries are exhausted.
class ProviderUnavailable : public Error {
 public:
  ProviderUnavailable(std::size_t batch_index, const std::string& message)
      : Error(ErrorKind::kProviderUnavailable, message), batch_index_(batch_index) {}

  std::size_t batch_index() const noexcept { return batch_index_; }

 private:
  std::size_t batch_index_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace docroute
