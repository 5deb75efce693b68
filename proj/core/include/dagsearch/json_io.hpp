#pragma once

#include <string>

#include "dagsearch/databuild.hpp"
#include "dagsearch/exec.hpp"
#include "dagsearch/plan.hpp"
#include "dagsearch/reward.hpp"
#include "dagsearch/rollout.hpp"
#include "dagsearch/segments.hpp"

namespace dagsearch {

// JSON renderings of the domain types, one compact object per call.
// Every *_from_json inverts its *_to_json; malformed input raises
// Error(MalformedRecord).

std::string plan_to_json(const SearchPlan& plan);
SearchPlan plan_from_json(const std::string& text);

std::string report_to_json(const ValidationReport& report);
ValidationReport report_from_json(const std::string& text);

std::string trace_to_json(const ExecutionTrace& trace);
ExecutionTrace trace_from_json(const std::string& text);

std::string segments_to_json(const Segments& segments);
Segments segments_from_json(const std::string& text);

std::string reward_to_json(const RewardBreakdown& reward);
RewardBreakdown reward_from_json(const std::string& text);

std::string gold_to_json(const GoldAnswer& gold);
GoldAnswer gold_from_json(const std::string& text);

std::string rollout_record_to_json(const RolloutRecord& record);
RolloutRecord rollout_record_from_json(const std::string& text);

std::string group_record_to_json(const GroupRecord& record);
GroupRecord group_record_from_json(const std::string& text);

std::string qa_pair_to_json(const QAPair& pair);
QAPair qa_pair_from_json(const std::string& text);

}  // namespace dagsearch
