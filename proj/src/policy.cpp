#include "omab/bandit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace omab {

GroundTruth GroundTruth::from_ctr(std::vector<double> ctr) {
  if (ctr.empty()) throw std::invalid_argument("GroundTruth: ctr vector is empty");
  GroundTruth gt;
  gt.best_arm = 0;
  gt.best_ctr = ctr[0];
  for (std::size_t k = 0; k < ctr.size(); ++k) {
    if (!(ctr[k] >= 0.0 && ctr[k] <= 1.0))
      throw std::invalid_argument("GroundTruth: ctr[" + std::to_string(k) + "] outside [0,1]");
    if (ctr[k] > gt.best_ctr) {
      gt.best_ctr = ctr[k];
      gt.best_arm = static_cast<ArmId>(k);
    }
  }
  gt.ctr = std::move(ctr);
  return gt;
}

namespace {

void check_index_args(double alpha, std::uint64_t t) {
  if (!(alpha > 0.0)) throw std::invalid_argument("index: alpha must be > 0");
  if (t < 1) throw std::invalid_argument("index: t must be >= 1");
}

}  // namespace

double adaucb_index(const ArmStats& stats, double normalized_load, std::uint64_t t, double alpha) {
  if (!(normalized_load >= 0.0 && normalized_load <= 1.0))
    throw std::invalid_argument("adaucb_index: normalized_load outside [0,1]");
  check_index_args(alpha, t);
  if (stats.pulls == 0) return unexplored_index();
  const double bonus =
      alpha * (1.0 - normalized_load) * std::log(static_cast<double>(t)) / static_cast<double>(stats.pulls);
  return stats.mean() + std::sqrt(bonus);
}

double ucb1_index(const ArmStats& stats, std::uint64_t t, double alpha) {
  check_index_args(alpha, t);
  if (stats.pulls == 0) return unexplored_index();
  const double bonus = alpha * std::log(static_cast<double>(t)) / static_cast<double>(stats.pulls);
  return stats.mean() + std::sqrt(bonus);
}

double deg_epsilon(std::uint64_t t, double epsilon0, double tau) {
  return epsilon0 / (1.0 + static_cast<double>(t) / tau);
}

const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Uniform: return "uniform";
    case PolicyKind::Deg: return "deg";
    case PolicyKind::Ts: return "ts";
    case PolicyKind::Ucb1: return "ucb1";
    case PolicyKind::AdaUcb: return "adaucb";
    case PolicyKind::Optimal: return "optimal";
  }
  return "?";
}

std::optional<PolicyKind> policy_from_name(std::string_view name) {
  if (name == "uniform") return PolicyKind::Uniform;
  if (name == "deg") return PolicyKind::Deg;
  if (name == "ts") return PolicyKind::Ts;
  if (name == "ucb1") return PolicyKind::Ucb1;
  if (name == "adaucb") return PolicyKind::AdaUcb;
  if (name == "optimal") return PolicyKind::Optimal;
  return std::nullopt;
}

Policy::Policy(int num_arms, std::uint64_t seed)
    : num_arms_(num_arms), stats_(static_cast<std::size_t>(num_arms > 0 ? num_arms : 0)), rng_(seed) {
  if (num_arms < 1) throw std::invalid_argument("Policy: need at least one arm");
}

void Policy::update(ArmId arm, int reward) {
  if (arm < 0 || arm >= num_arms_) throw std::invalid_argument("update: arm out of range");
  if (reward != 0 && reward != 1) throw std::invalid_argument("update: reward must be 0 or 1");
  auto& s = stats_[static_cast<std::size_t>(arm)];
  s.pulls += 1;
  s.reward_sum += static_cast<double>(reward);
}

std::vector<double> Policy::ctr_estimates() const {
  std::vector<double> est(stats_.size());
  for (std::size_t k = 0; k < stats_.size(); ++k)
    est[k] = stats_[k].pulls > 0 ? stats_[k].mean() : std::numeric_limits<double>::quiet_NaN();
  return est;
}

void Policy::check_select_args(double normalized_load, std::uint64_t t) const {
  if (!(normalized_load >= 0.0 && normalized_load <= 1.0))
    throw std::invalid_argument("select: normalized_load outside [0,1]");
  if (t < 1) throw std::invalid_argument("select: t must be >= 1");
}

ArmId Policy::uniform_arm() {
  return std::uniform_int_distribution<ArmId>(0, num_arms_ - 1)(rng_);
}

ArmId Policy::greedy_arm() const {
  ArmId best = 0;
  double best_mean = -1.0;
  for (ArmId k = 0; k < num_arms_; ++k) {
    const auto& s = stats_[static_cast<std::size_t>(k)];
    const double m = s.pulls > 0 ? s.mean() : 0.0;
    if (m > best_mean) {
      best_mean = m;
      best = k;
    }
  }
  return best;
}

ArmId UniformPolicy::select(double normalized_load, std::uint64_t t) {
  check_select_args(normalized_load, t);
  return uniform_arm();
}

DegPolicy::DegPolicy(int num_arms, std::uint64_t seed, double epsilon0, double tau)
    : Policy(num_arms, seed), epsilon0_(epsilon0), tau_(tau) {
  if (!(epsilon0 > 0.0 && epsilon0 <= 1.0)) throw std::invalid_argument("DegPolicy: epsilon0 must be in (0,1]");
  if (!(tau > 0.0)) throw std::invalid_argument("DegPolicy: tau must be > 0");
}

ArmId DegPolicy::select(double normalized_load, std::uint64_t t) {
  check_select_args(normalized_load, t);
  const double eps = deg_epsilon(t, epsilon0_, tau_);
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < eps) return uniform_arm();
  return greedy_arm();
}

TsPolicy::TsPolicy(int num_arms, std::uint64_t seed)
    : Policy(num_arms, seed),
      successes_(static_cast<std::size_t>(num_arms), 1),
      failures_(static_cast<std::size_t>(num_arms), 1) {}

namespace {

// Beta(a,b) via two gamma draws; a,b >= 1 here so the ratio is well defined.
double sample_beta(double a, double b, std::mt19937_64& rng) {
  const double g1 = std::gamma_distribution<double>(a, 1.0)(rng);
  const double g2 = std::gamma_distribution<double>(b, 1.0)(rng);
  const double s = g1 + g2;
  return s > 0.0 ? g1 / s : 0.5;
}

}  // namespace

ArmId TsPolicy::select(double normalized_load, std::uint64_t t) {
  check_select_args(normalized_load, t);
  ArmId best = 0;
  double best_sample = -1.0;
  for (ArmId k = 0; k < num_arms_; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const double draw = sample_beta(static_cast<double>(successes_[idx]),
                                    static_cast<double>(failures_[idx]), rng_);
    if (draw > best_sample) {
      best_sample = draw;
      best = k;
    }
  }
  return best;
}

void TsPolicy::update(ArmId arm, int reward) {
  Policy::update(arm, reward);
  if (reward == 1)
    successes_[static_cast<std::size_t>(arm)] += 1;
  else
    failures_[static_cast<std::size_t>(arm)] += 1;
}

Ucb1Policy::Ucb1Policy(int num_arms, std::uint64_t seed, double alpha)
    : Policy(num_arms, seed), alpha_(alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("Ucb1Policy: alpha must be > 0");
}

ArmId Ucb1Policy::select(double normalized_load, std::uint64_t t) {
  check_select_args(normalized_load, t);
  ArmId best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (ArmId k = 0; k < num_arms_; ++k) {
    const double idx = ucb1_index(stats_[static_cast<std::size_t>(k)], t, alpha_);
    if (idx > best_index) {
      best_index = idx;
      best = k;
    }
  }
  return best;
}

AdaUcbPolicy::AdaUcbPolicy(int num_arms, std::uint64_t seed, double alpha)
    : Policy(num_arms, seed), alpha_(alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("AdaUcbPolicy: alpha must be > 0");
}

ArmId AdaUcbPolicy::select(double normalized_load, std::uint64_t t) {
  check_select_args(normalized_load, t);
  ArmId best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (ArmId k = 0; k < num_arms_; ++k) {
    const double idx = adaucb_index(stats_[static_cast<std::size_t>(k)], normalized_load, t, alpha_);
    if (idx > best_index) {
      best_index = idx;
      best = k;
    }
  }
  return best;
}

OptimalPolicy::OptimalPolicy(int num_arms, std::uint64_t seed, const GroundTruth& gt)
    : Policy(num_arms, seed), best_arm_(gt.best_arm) {
  if (gt.num_arms() != num_arms) throw std::invalid_argument("OptimalPolicy: ground truth arm count mismatch");
}

ArmId OptimalPolicy::select(double normalized_load, std::uint64_t t) {
  check_select_args(normalized_load, t);
  return best_arm_;
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, int num_arms, std::uint64_t seed,
                                    const PolicyParams& params, const GroundTruth* gt) {
  switch (kind) {
    case PolicyKind::Uniform: return std::make_unique<UniformPolicy>(num_arms, seed);
    case PolicyKind::Deg: return std::make_unique<DegPolicy>(num_arms, seed, params.epsilon0, params.tau);
    case PolicyKind::Ts: return std::make_unique<TsPolicy>(num_arms, seed);
    case PolicyKind::Ucb1: return std::make_unique<Ucb1Policy>(num_arms, seed, params.alpha);
    case PolicyKind::AdaUcb: return std::make_unique<AdaUcbPolicy>(num_arms, seed, params.alpha);
    case PolicyKind::Optimal:
      if (gt == nullptr) throw std::invalid_argument("make_policy: Optimal requires ground truth");
      return std::make_unique<OptimalPolicy>(num_arms, seed, *gt);
  }
  throw std::invalid_argument("make_policy: unknown policy kind");
}

}  // namespace omab
