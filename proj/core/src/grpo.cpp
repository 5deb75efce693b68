#include "dagsearch/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dagsearch/errors.hpp"

namespace dagsearch {

std::vector<double> group_advantages(const std::vector<double>& rewards) {
  if (rewards.empty()) {
    throw Error(ErrorKind::EmptyGroup, "advantage estimation needs at least one rollout");
  }
  for (double r : rewards) {
    if (!std::isfinite(r)) throw std::invalid_argument("non-finite reward in group");
  }
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(rewards.size());

  std::vector<double> advantages(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) advantages[i] = rewards[i] - mean;
  return advantages;
}

double beta_at(std::size_t step, const BetaSchedule& schedule) {
  if (schedule.total_steps < 1 || schedule.beta_end < 0.0 ||
      schedule.beta_start < schedule.beta_end) {
    throw std::invalid_argument("beta schedule requires beta_start >= beta_end >= 0 and total_steps >= 1");
  }
  if (step > schedule.total_steps) {
    throw Error(ErrorKind::StepOutOfRange, "step beyond schedule length");
  }
  double fraction = static_cast<double>(step) / static_cast<double>(schedule.total_steps);
  double value = schedule.beta_start + (schedule.beta_end - schedule.beta_start) * fraction;
  return std::clamp(value, schedule.beta_end, schedule.beta_start);
}

double grpo_loss(const std::vector<TrajectoryStats>& batch, double beta) {
  if (batch.empty()) {
    throw Error(ErrorKind::EmptyBatch, "loss over an empty batch");
  }
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  double sum = 0.0;
  for (const auto& t : batch) {
    if (t.kl_estimate < 0.0) throw std::invalid_argument("kl_estimate must be >= 0");
    sum += t.advantage * t.logprob_ratio - beta * t.kl_estimate;
  }
  return -sum / static_cast<double>(batch.size());
}

std::vector<bool> loss_mask(const Segments& segments, const std::vector<TokenSpan>& token_spans) {
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < token_spans.size(); ++i) {
    const TokenSpan& t = token_spans[i];
    if (t.end <= t.begin) {
      throw Error(ErrorKind::InconsistentSpans, "empty or inverted token span");
    }
    if (i > 0 && t.begin < cursor) {
      throw Error(ErrorKind::InconsistentSpans, "token spans overlap or are unordered");
    }
    cursor = t.end;
  }

  std::vector<bool> keep(token_spans.size(), true);
  if (!segments.result) return keep;

  const Span result = *segments.result;
  for (std::size_t i = 0; i < token_spans.size(); ++i) {
    const TokenSpan& t = token_spans[i];
    bool intersects = t.begin < result.end && t.end > result.begin;
    if (intersects) keep[i] = false;
  }
  return keep;
}

}  // namespace dagsearch
