#pragma once

#include <cstddef>
#include <vector>

#include "dagsearch/segments.hpp"

namespace dagsearch {

/// Per-trajectory inputs to the group loss. logprob_ratio is the sum over
/// unmasked tokens of log pi_theta - log pi_ref; the KL estimate is supplied
/// by the trainer (the estimator choice is not this module's business).
struct TrajectoryStats {
  double advantage = 0.0;
  double logprob_ratio = 0.0;
  double kl_estimate = 0.0;
};

/// Linear annealing schedule for the KL coefficient.
struct BetaSchedule {
  double beta_start = 0.1;
  double beta_end = 0.01;
  std::size_t total_steps = 1;
};

/// Group-relative advantages: A_i = r_i - mean(r). Sums to zero.
/// Throws Error(EmptyGroup) on an empty group.
std::vector<double> group_advantages(const std::vector<double>& rewards);

/// Schedule value at `step`: start + (end - start) * step / total, clamped
/// to [end, start]. Throws Error(StepOutOfRange) when step > total_steps
/// or the schedule is ill-formed.
double beta_at(std::size_t step, const BetaSchedule& schedule);

/// Batch loss: -(1/|B|) * sum_i [ A_i * logprob_ratio_i - beta * kl_i ].
/// Throws Error(EmptyBatch) on an empty batch.
double grpo_loss(const std::vector<TrajectoryStats>& batch, double beta);

/// Character range [begin, end) of one token of the output text.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// keep[t] per token: false exactly when the token's character range
/// intersects the result body (externally inserted content). Tag literals
/// and everything the policy itself emitted stay true; a token straddling
/// the result boundary is masked out.
///
/// Token spans must be ordered, non-overlapping and non-empty; otherwise
/// Error(InconsistentSpans).
std::vector<bool> loss_mask(const Segments& segments, const std::vector<TokenSpan>& token_spans);

}  // namespace dagsearch
