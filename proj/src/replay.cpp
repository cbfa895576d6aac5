#include "omab/replay.hpp"

#include <string>

#include "omab/errors.hpp"
#include "omab/report.hpp"

namespace omab {

ReplayResult replay(Policy& policy, std::span<const LoggedEvent> log, std::int64_t T,
                    const GroundTruth& gt, int max_cycles) {
  if (log.empty()) throw DataError("replay: empty log");
  if (T < 1) throw std::invalid_argument("replay: T must be >= 1");
  if (max_cycles < 1) throw std::invalid_argument("replay: max_cycles must be >= 1");
  if (gt.num_arms() != policy.num_arms())
    throw std::invalid_argument("replay: ground truth arm count does not match policy");
  for (const auto& e : log)
    if (e.arm < 0 || e.arm >= policy.num_arms())
      throw DataError("replay: log contains arm " + std::to_string(e.arm) + " outside policy's " +
                      std::to_string(policy.num_arms()) + " arms");

  ReplayResult result;
  result.retained_indices.reserve(static_cast<std::size_t>(T));
  result.cumulative_reward.reserve(static_cast<std::size_t>(T));
  result.cumulative_regret.reserve(static_cast<std::size_t>(T));
  result.cumulative_regret_realized.reserve(static_cast<std::size_t>(T));

  double reward_sum = 0.0;
  double regret_sum = 0.0;
  double regret_realized_sum = 0.0;
  std::size_t pos = 0;

  while (result.valid_steps < T) {
    if (pos == log.size()) {
      pos = 0;
      ++result.cycles;
      if (result.cycles >= max_cycles) {
        result.final_stats = policy.stats();
        throw ReplayNonConvergence(
            "replay: only " + std::to_string(result.valid_steps) + " of " + std::to_string(T) +
                " events retained after " + std::to_string(max_cycles) + " passes over the log",
            std::move(result));
      }
    }
    const LoggedEvent& e = log[pos];
    ++result.events_consumed;
    // The trial clock counts retained steps only; rejections do not advance it.
    const auto t = static_cast<std::uint64_t>(result.valid_steps + 1);
    const ArmId chosen = policy.select(e.normalized_load, t);
    if (chosen == e.arm) {
      policy.update(e.arm, e.reward);
      reward_sum += static_cast<double>(e.reward);
      regret_sum += regret_step(e.load, e.arm, gt);
      regret_realized_sum += e.load * (gt.best_ctr - static_cast<double>(e.reward));
      result.retained_indices.push_back(static_cast<std::uint64_t>(pos));
      result.cumulative_reward.push_back(reward_sum);
      result.cumulative_regret.push_back(regret_sum);
      result.cumulative_regret_realized.push_back(regret_realized_sum);
      ++result.valid_steps;
    }
    ++pos;
  }
  result.final_stats = policy.stats();
  return result;
}

}  // namespace omab
