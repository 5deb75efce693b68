#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dagsearch {

enum class ErrorKind {
  // plan parsing / validation
  MalformedNodeLine,
  DuplicateNodeId,
  MalformedEdge,
  EmptyPlan,
  CycleDetected,
  // structured output template
  MissingTag,
  DuplicateTag,
  OutOfOrder,
  UnclosedTag,
  PrefixNotPaused,
  InconsistentSpans,
  // search execution
  Timeout,
  HttpError,
  AuthMissing,
  AllBackendsFailed,
  // scoring
  WeightSumInvalid,
  JudgeUnavailable,
  UnparsableVerdict,
  // policy optimization arithmetic
  EmptyGroup,
  EmptyBatch,
  StepOutOfRange,
  // rollout protocol
  PolicyUnreachable,
  GenerationLimitExceeded,
  // dataset construction
  EmbeddingDimMismatch,
  GeneratorUnavailable,
  UnparsableGeneration,
  CheckerUnavailable,
  CorpusInvalid,
  // interface
  ConfigInvalid,
  BindFailure,
  IoFailure,
  MalformedRecord,
};

/// Single exception type for all domain failures. The kind carries the
/// machine-readable reason used by the CLI and the HTTP error bodies;
/// the what() string is for humans and never contains secret values.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  Error(ErrorKind kind, std::string message, int http_status)
      : std::runtime_error(std::move(message)), kind_(kind), http_status_(http_status) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Upstream HTTP status for ErrorKind::HttpError; 0 otherwise.
  int http_status() const noexcept { return http_status_; }

 private:
  ErrorKind kind_;
  int http_status_ = 0;
};

std::string_view error_kind_name(ErrorKind kind);

}  // namespace dagsearch
