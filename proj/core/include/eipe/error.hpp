#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eipe {

enum class ErrorCode {
  // plan text format
  EmptyInput,
  IndentationError,
  EmptyNodeContent,
  DepthExceeded,
  // addressing and edits
  PathNotFound,
  WouldCreateCycle,
  EmptyContent,
  RootImmovable,
  ParseError,
  // llm
  TemplateError,
  TransportError,
  ReplayMiss,
  NetworkForbidden,
  InvalidEmbedding,
  // pipeline
  UnparseablePlan,
  EmptyQuestionSet,
  MalformedStepOutput,
  UnparseableVerdict,
  // persistence
  IoError,
  SchemaError,
  DuplicateId,
  EmptyCorpus,
  // numerics and aggregation
  TooFewVectors,
  DimensionMismatch,
  EvenVoteCount,
  MixedComparisons,
  EmptyResults,
  // generic
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Errors raised by the llm module. Other modules document these collectively
// as "LLMError".
bool is_llm_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  // Message without the "Code: " prefix that what() carries.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace eipe
