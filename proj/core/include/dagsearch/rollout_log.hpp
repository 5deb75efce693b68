#pragma once

#include <string>
#include <vector>

#include "dagsearch/rollout.hpp"

namespace dagsearch {

/// One persisted rollout: the record plus run metadata. Stored as
/// newline-delimited JSON, append-only.
struct RolloutLogRecord {
  RolloutRecord record;
  std::string timestamp;  // ISO-8601 UTC
  std::string config_hash;
  std::string engine_version;

  bool operator==(const RolloutLogRecord&) const = default;
};

RolloutLogRecord make_log_record(RolloutRecord record, const std::string& config_hash);

std::string log_record_to_json(const RolloutLogRecord& record);
RolloutLogRecord log_record_from_json(const std::string& text);

/// Appends one line. Concurrent appenders produce intact, non-interleaved
/// lines. Throws Error(IoFailure) when the path cannot be written.
void append_rollout_log(const RolloutLogRecord& record, const std::string& path);

std::vector<RolloutLogRecord> read_rollout_log(const std::string& path);

}  // namespace dagsearch
