#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace omab {

/// Zero-based arm index in [0, K).
using ArmId = int;

/// Per-arm pull count and reward sum. Rewards are binary, so
/// 0 <= reward_sum <= pulls and mean() lies in [0,1] once pulls > 0.
struct ArmStats {
  std::uint64_t pulls = 0;
  double reward_sum = 0.0;

  /// Empirical mean reward. Only defined when pulls > 0.
  double mean() const { return reward_sum / static_cast<double>(pulls); }
};

/// True per-arm CTRs used to score regret and correlation.
/// best_arm attains best_ctr, ties broken to the lowest index.
struct GroundTruth {
  std::vector<double> ctr;
  double best_ctr = 0.0;
  ArmId best_arm = 0;

  static GroundTruth from_ctr(std::vector<double> ctr);
  int num_arms() const { return static_cast<int>(ctr.size()); }
};

/// Index value assigned to arms that were never pulled: greater than any
/// finite index, so unexplored arms win every argmax.
inline double unexplored_index() { return std::numeric_limits<double>::infinity(); }

/// Load-adaptive upper confidence bound:
///   mean + sqrt(alpha * (1 - normalized_load) * ln(t) / pulls).
/// Returns unexplored_index() when pulls == 0. Throws std::invalid_argument
/// for normalized_load outside [0,1], alpha <= 0, or t < 1.
double adaucb_index(const ArmStats& stats, double normalized_load, std::uint64_t t, double alpha);

/// Classic UCB1 bound: mean + sqrt(alpha * ln(t) / pulls). Equals
/// adaucb_index at normalized_load == 0.
double ucb1_index(const ArmStats& stats, std::uint64_t t, double alpha);

/// Annealed exploration rate epsilon0 / (1 + t/tau): strictly decreasing
/// in t and tending to 0.
double deg_epsilon(std::uint64_t t, double epsilon0, double tau);

enum class PolicyKind { Uniform, Deg, Ts, Ucb1, AdaUcb, Optimal };

const char* policy_name(PolicyKind kind);
std::optional<PolicyKind> policy_from_name(std::string_view name);

/// Tunables shared by the policy variants. Unused fields are ignored by
/// policies that do not consume them.
struct PolicyParams {
  double alpha = 1.0;      // UCB1 / AdaUCB confidence width
  double epsilon0 = 0.1;   // DEG initial exploration rate, in (0,1]
  double tau = 10000.0;    // DEG decay horizon, > 0
};

/// One selection strategy plus its per-arm statistics.
///
/// Single-writer: select() and update() are called sequentially within one
/// run. Instances are independent; concurrent runs each own their policy.
/// Given an identical seed and call sequence, the selection sequence is
/// reproducible bit for bit.
class Policy {
 public:
  Policy(int num_arms, std::uint64_t seed);
  virtual ~Policy() = default;

  /// Chooses an arm for trial t (t >= 1) given the normalized load.
  /// All argmax ties break to the lowest arm index.
  virtual ArmId select(double normalized_load, std::uint64_t t) = 0;

  /// Records one binary observation for `arm`. Throws std::invalid_argument
  /// for an out-of-range arm or a reward outside {0,1}.
  virtual void update(ArmId arm, int reward);

  int num_arms() const { return num_arms_; }
  const ArmStats& arm_stats(ArmId arm) const { return stats_[static_cast<std::size_t>(arm)]; }
  const std::vector<ArmStats>& stats() const { return stats_; }

  /// Final per-arm CTR estimates; NaN for arms never pulled.
  std::vector<double> ctr_estimates() const;

 protected:
  void check_select_args(double normalized_load, std::uint64_t t) const;
  ArmId uniform_arm();
  /// Argmax of empirical means, treating unpulled arms as mean 0.
  ArmId greedy_arm() const;

  int num_arms_;
  std::vector<ArmStats> stats_;
  std::mt19937_64 rng_;
};

/// A/B baseline: every trial draws an arm uniformly at random.
class UniformPolicy final : public Policy {
 public:
  UniformPolicy(int num_arms, std::uint64_t seed) : Policy(num_arms, seed) {}
  ArmId select(double normalized_load, std::uint64_t t) override;
};

/// Decaying epsilon-greedy: explore a uniform arm with probability
/// deg_epsilon(t), otherwise exploit the argmax of empirical means.
class DegPolicy final : public Policy {
 public:
  DegPolicy(int num_arms, std::uint64_t seed, double epsilon0, double tau);
  ArmId select(double normalized_load, std::uint64_t t) override;

  double epsilon0() const { return epsilon0_; }
  double tau() const { return tau_; }

 private:
  double epsilon0_;
  double tau_;
};

/// Thompson sampling with per-arm Beta posteriors starting from Beta(1,1).
class TsPolicy final : public Policy {
 public:
  TsPolicy(int num_arms, std::uint64_t seed);
  ArmId select(double normalized_load, std::uint64_t t) override;
  void update(ArmId arm, int reward) override;

  std::uint64_t successes(ArmId arm) const { return successes_[static_cast<std::size_t>(arm)]; }
  std::uint64_t failures(ArmId arm) const { return failures_[static_cast<std::size_t>(arm)]; }

 private:
  std::vector<std::uint64_t> successes_;  // Beta alpha counts, start at 1
  std::vector<std::uint64_t> failures_;   // Beta beta counts, start at 1
};

/// UCB1: argmax of ucb1_index; unexplored arms first, lowest index first.
class Ucb1Policy final : public Policy {
 public:
  Ucb1Policy(int num_arms, std::uint64_t seed, double alpha);
  ArmId select(double normalized_load, std::uint64_t t) override;
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

/// Opportunistic UCB: argmax of adaucb_index, whose exploration bonus
/// shrinks linearly with the normalized load.
class AdaUcbPolicy final : public Policy {
 public:
  AdaUcbPolicy(int num_arms, std::uint64_t seed, double alpha);
  ArmId select(double normalized_load, std::uint64_t t) override;
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

/// Oracle that always selects the ground-truth best arm.
class OptimalPolicy final : public Policy {
 public:
  OptimalPolicy(int num_arms, std::uint64_t seed, const GroundTruth& gt);
  ArmId select(double normalized_load, std::uint64_t t) override;

 private:
  ArmId best_arm_;
};

/// Builds a policy of the given kind. `gt` is required for Optimal and
/// ignored otherwise.
std::unique_ptr<Policy> make_policy(PolicyKind kind, int num_arms, std::uint64_t seed,
                                    const PolicyParams& params, const GroundTruth* gt = nullptr);

}  // namespace omab
