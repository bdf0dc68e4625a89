#include "eipe/error.hpp"

namespace eipe {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IndentationError: return "IndentationError";
    case ErrorCode::EmptyNodeContent: return "EmptyNodeContent";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::PathNotFound: return "PathNotFound";
    case ErrorCode::WouldCreateCycle: return "WouldCreateCycle";
    case ErrorCode::EmptyContent: return "EmptyContent";
    case ErrorCode::RootImmovable: return "RootImmovable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TemplateError: return "TemplateError";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::ReplayMiss: return "ReplayMiss";
    case ErrorCode::NetworkForbidden: return "NetworkForbidden";
    case ErrorCode::InvalidEmbedding: return "InvalidEmbedding";
    case ErrorCode::UnparseablePlan: return "UnparseablePlan";
    case ErrorCode::EmptyQuestionSet: return "EmptyQuestionSet";
    case ErrorCode::MalformedStepOutput: return "MalformedStepOutput";
    case ErrorCode::UnparseableVerdict: return "UnparseableVerdict";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::TooFewVectors: return "TooFewVectors";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EvenVoteCount: return "EvenVoteCount";
    case ErrorCode::MixedComparisons: return "MixedComparisons";
    case ErrorCode::EmptyResults: return "EmptyResults";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

bool is_llm_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::TemplateError:
    case ErrorCode::TransportError:
    case ErrorCode::ReplayMiss:
    case ErrorCode::NetworkForbidden:
    case ErrorCode::InvalidEmbedding:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(message) {}

}  // namespace eipe
