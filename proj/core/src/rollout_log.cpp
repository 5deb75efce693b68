#include "dagsearch/rollout_log.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "dagsearch/errors.hpp"
#include "dagsearch/json_io.hpp"
#include "dagsearch/strings.hpp"
#include "dagsearch/version.hpp"

namespace dagsearch {

namespace {

std::string utc_now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

}  // namespace

RolloutLogRecord make_log_record(RolloutRecord record, const std::string& config_hash) {
  RolloutLogRecord log;
  log.record = std::move(record);
  log.timestamp = utc_now_iso8601();
  log.config_hash = config_hash;
  log.engine_version = std::string(kEngineVersion);
  return log;
}

std::string log_record_to_json(const RolloutLogRecord& record) {
  nlohmann::json j = nlohmann::json::parse(rollout_record_to_json(record.record));
  j["timestamp"] = record.timestamp;
  j["config_hash"] = record.config_hash;
  j["engine_version"] = record.engine_version;
  return j.dump();
}

RolloutLogRecord log_record_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, std::string("log line is not JSON: ") + e.what());
  }
  RolloutLogRecord log;
  log.record = rollout_record_from_json(text);
  try {
    log.timestamp = j.at("timestamp").get<std::string>();
    log.config_hash = j.at("config_hash").get<std::string>();
    log.engine_version = j.at("engine_version").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, std::string("log metadata malformed: ") + e.what());
  }
  return log;
}

void append_rollout_log(const RolloutLogRecord& record, const std::string& path) {
  std::string line = log_record_to_json(record);
  line += '\n';
  // One fwrite on an O_APPEND stream keeps concurrent lines intact.
  std::FILE* f = std::fopen(path.c_str(), "a");
  if (!f) throw Error(ErrorKind::IoFailure, "cannot open log for append: " + path);
  std::size_t written = std::fwrite(line.data(), 1, line.size(), f);
  int flushed = std::fflush(f);
  std::fclose(f);
  if (written != line.size() || flushed != 0) {
    throw Error(ErrorKind::IoFailure, "short write to log: " + path);
  }
}

std::vector<RolloutLogRecord> read_rollout_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read log: " + path);
  std::vector<RolloutLogRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    out.push_back(log_record_from_json(line));
  }
  return out;
}

}  // namespace dagsearch
