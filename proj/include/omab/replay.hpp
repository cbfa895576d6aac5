#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "omab/bandit.hpp"
#include "omab/event_log.hpp"

namespace omab {

/// Outcome of one replay pass: per-retained-step trajectories plus
/// retention accounting. Trajectories have length valid_steps.
struct ReplayResult {
  std::int64_t valid_steps = 0;                 // retained events (== T on success)
  std::vector<std::uint64_t> retained_indices;  // positions of retained events in the source log
  std::vector<double> cumulative_reward;        // R_t, non-decreasing
  std::vector<double> cumulative_regret;        // sum of L * (c* - c_arm), expectation form
  std::vector<double> cumulative_regret_realized;  // sum of L * (c* - r), secondary
  std::uint64_t events_consumed = 0;            // log reads including rejections
  int cycles = 0;                               // completed wraps over the log
  std::vector<ArmStats> final_stats;
};

/// Thrown when the policy fails to match enough logged events within
/// max_cycles passes over the log. Carries everything retained so far.
class ReplayNonConvergence : public std::runtime_error {
 public:
  ReplayNonConvergence(const std::string& what, ReplayResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const ReplayResult& partial() const { return partial_; }

 private:
  ReplayResult partial_;
};

/// Offline evaluation by rejection: steps through the log, asks the policy
/// for an arm at each logged event, and retains the event only when the
/// choice matches the logged arm. Retained events update the policy and
/// the trajectories; rejected events change nothing and never reveal their
/// reward. The trial clock t passed to the policy counts retained steps
/// only, starting at 1. Wraps to the log start when exhausted; throws
/// ReplayNonConvergence after max_cycles full passes without reaching T.
///
/// Unbiasedness requires the log to come from a uniform-random logging
/// policy; that is the caller's responsibility and is not checked.
ReplayResult replay(Policy& policy, std::span<const LoggedEvent> log, std::int64_t T,
                    const GroundTruth& gt, int max_cycles = 100);

}  // namespace omab
