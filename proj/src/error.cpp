#include "altc/error.hpp"

namespace altc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::ZeroClassCount: return "ZeroClassCount";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::AllZeroVector: return "AllZeroVector";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::MissingGoldLabel: return "MissingGoldLabel";
    case ErrorCode::SessionCancelled: return "SessionCancelled";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::NotPending: return "NotPending";
    case ErrorCode::IncompleteBatch: return "IncompleteBatch";
  }
  return "Unknown";
}

}  // namespace altc
