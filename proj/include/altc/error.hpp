#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace altc {

enum class ErrorCode {
  UnknownLabel,
  DuplicateId,
  MalformedRecord,
  MissingColumn,
  EmptyCorpus,
  ZeroClassCount,
  DimensionMismatch,
  LengthMismatch,
  EmptyTrainingSet,
  NonFiniteLoss,
  AllZeroVector,
  EmptyPool,
  MissingGoldLabel,
  SessionCancelled,
  LabelOutOfRange,
  EmptyMatrix,
  SchemaMismatch,
  InvalidArgument,
  IoError,
  ProtocolError,
  NotPending,
  IncompleteBatch,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library. `subject` names the offending entity
// (record id, column name, class index, line number) when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {})
      : std::runtime_error(std::move(message)), code_(code), subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace altc
