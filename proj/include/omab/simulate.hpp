#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "omab/bandit.hpp"
#include "omab/event_log.hpp"
#include "omab/load.hpp"

namespace omab {

enum class LoadScenario { PurchasingPower, TrafficIntensity };

const char* scenario_name(LoadScenario scenario);

/// Distribution of the per-event load under the purchasing-power scenario.
enum class LoadDistribution { Lognormal, Bimodal };

/// Two-point load profile; makes the opportunistic gap between low- and
/// high-cost trials fully visible after normalization.
struct BimodalLoadParams {
  double p_low = 0.5;
  double low = 1.0;
  double high = 9.0;
};

/// Per-interval arrival counts for the traffic-intensity scenario:
/// lognormal(rate_mu, rate_sigma) rounded and clamped to
/// [1, interval_seconds] so integer-second timestamps stay distinct.
struct TrafficLoadParams {
  std::int64_t interval_seconds = 900;
  double rate_mu = 4.0;
  double rate_sigma = 1.0;
};

struct LoadModel {
  LoadScenario scenario = LoadScenario::PurchasingPower;
  LoadDistribution distribution = LoadDistribution::Lognormal;
  PurchaseLoadParams lognormal;
  BimodalLoadParams bimodal;
  TrafficLoadParams traffic;
};

/// Synthetic uniformly-logged experiment description.
struct SyntheticSpec {
  int num_arms = 3;
  std::vector<double> ctr = {0.02, 0.035, 0.05};
  std::int64_t n_events = 3000000;
  LoadModel load;
  double rho = 0.05;
  std::uint64_t seed = 1;
};

/// Per-event real-load source. next() may return missing_load() (no
/// purchase history); callers impute before normalizing.
class LoadStream {
 public:
  virtual ~LoadStream() = default;
  virtual double next(std::mt19937_64& rng) = 0;
};

std::unique_ptr<LoadStream> make_load_stream(const LoadModel& model);

/// I.i.d. two-point load generator: `low` with probability p_low, else
/// `high`. Requires 0 < p_low < 1 and low < high.
std::unique_ptr<LoadStream> bimodal_load_stream(double p_low, double low, double high);

/// Generates a uniformly-logged synthetic stream: arms i.i.d. uniform,
/// rewards Bernoulli(ctr[arm]) independent of the load, loads from the
/// configured model (missing values imputed), normalized loads fitted on
/// the generated sample, timestamps strictly increasing.
std::vector<LoggedEvent> generate_log(const SyntheticSpec& spec);

/// Trajectories of a direct online run against the generator.
struct OnlineResult {
  std::vector<double> cumulative_regret;           // expectation form
  std::vector<double> cumulative_clicks;
  std::vector<double> cumulative_regret_realized;

  /// Average realized reward per step.
  double value() const {
    return cumulative_clicks.empty() ? 0.0
                                     : cumulative_clicks.back() / static_cast<double>(cumulative_clicks.size());
  }
};

/// Runs the trial loop directly against the generator for T steps: observe
/// a fresh load, select, then draw a Bernoulli reward for the chosen arm
/// only. Serves as the independent oracle for replay's unbiasedness. The
/// normalizer and imputation mean are fitted on a separate calibration
/// stream derived from spec.seed.
OnlineResult simulate_online(Policy& policy, const SyntheticSpec& spec, std::int64_t T);

}  // namespace omab
