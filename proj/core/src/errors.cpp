#include "dagsearch/errors.hpp"

namespace dagsearch {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedNodeLine: return "MalformedNodeLine";
    case ErrorKind::DuplicateNodeId: return "DuplicateNodeId";
    case ErrorKind::MalformedEdge: return "MalformedEdge";
    case ErrorKind::EmptyPlan: return "EmptyPlan";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::MissingTag: return "MissingTag";
    case ErrorKind::DuplicateTag: return "DuplicateTag";
    case ErrorKind::OutOfOrder: return "OutOfOrder";
    case ErrorKind::UnclosedTag: return "UnclosedTag";
    case ErrorKind::PrefixNotPaused: return "PrefixNotPaused";
    case ErrorKind::InconsistentSpans: return "InconsistentSpans";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::HttpError: return "HttpError";
    case ErrorKind::AuthMissing: return "AuthMissing";
    case ErrorKind::AllBackendsFailed: return "AllBackendsFailed";
    case ErrorKind::WeightSumInvalid: return "WeightSumInvalid";
    case ErrorKind::JudgeUnavailable: return "JudgeUnavailable";
    case ErrorKind::UnparsableVerdict: return "UnparsableVerdict";
    case ErrorKind::EmptyGroup: return "EmptyGroup";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::StepOutOfRange: return "StepOutOfRange";
    case ErrorKind::PolicyUnreachable: return "PolicyUnreachable";
    case ErrorKind::GenerationLimitExceeded: return "GenerationLimitExceeded";
    case ErrorKind::EmbeddingDimMismatch: return "EmbeddingDimMismatch";
    case ErrorKind::GeneratorUnavailable: return "GeneratorUnavailable";
    case ErrorKind::UnparsableGeneration: return "UnparsableGeneration";
    case ErrorKind::CheckerUnavailable: return "CheckerUnavailable";
    case ErrorKind::CorpusInvalid: return "CorpusInvalid";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::BindFailure: return "BindFailure";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
  }
  return "UnknownError";
}

}  // namespace dagsearch
