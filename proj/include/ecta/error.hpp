#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecta {

// Error codes, grouped by the exit-code class the CLI maps them to.
enum class errc {
  // data errors (exit 1)
  empty_input,
  malformed_record,
  duplicate_id,
  invariant_violation,
  overlapping_spans,
  span_not_found,
  unbalanced_delimiter,
  duplicate_ordinal,
  dangling_ordinal,
  missing_slot,
  empty_document,
  unparsable_annotation,
  unknown_rule_id,
  too_few_documents,
  dimension_mismatch,
  rank_too_large,
  non_finite_loss,
  io_error,

  // usage errors (exit 2)
  bad_config,

  // backend errors (exit 3)
  timeout,
  http_status,
  backend_unreachable,
  malformed_backend_response,
  mock_miss,
};

enum class error_class { data = 1, usage = 2, backend = 3 };

inline error_class classify(errc c) {
  switch (c) {
    case errc::bad_config:
      return error_class::usage;
    case errc::timeout:
    case errc::http_status:
    case errc::backend_unreachable:
    case errc::malformed_backend_response:
    case errc::mock_miss:
      return error_class::backend;
    default:
      return error_class::data;
  }
}

inline std::string_view errc_name(errc c) {
  switch (c) {
    case errc::empty_input: return "EmptyInput";
    case errc::malformed_record: return "MalformedRecord";
    case errc::duplicate_id: return "DuplicateId";
    case errc::invariant_violation: return "InvariantViolation";
    case errc::overlapping_spans: return "OverlappingSpans";
    case errc::span_not_found: return "SpanNotFound";
    case errc::unbalanced_delimiter: return "UnbalancedDelimiter";
    case errc::duplicate_ordinal: return "DuplicateOrdinal";
    case errc::dangling_ordinal: return "DanglingOrdinal";
    case errc::missing_slot: return "MissingSlot";
    case errc::empty_document: return "EmptyDocument";
    case errc::unparsable_annotation: return "UnparsableAnnotation";
    case errc::unknown_rule_id: return "UnknownRuleId";
    case errc::too_few_documents: return "TooFewDocuments";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::rank_too_large: return "RankTooLarge";
    case errc::non_finite_loss: return "NonFiniteLoss";
    case errc::io_error: return "IoError";
    case errc::bad_config: return "BadConfig";
    case errc::timeout: return "Timeout";
    case errc::http_status: return "HttpStatus";
    case errc::backend_unreachable: return "BackendUnreachable";
    case errc::malformed_backend_response: return "MalformedBackendResponse";
    case errc::mock_miss: return "MockMiss";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const { return code_; }
  error_class klass() const { return classify(code_); }

 private:
  errc code_;
};

}  // namespace ecta
