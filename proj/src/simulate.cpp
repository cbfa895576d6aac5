#include "omab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "omab/errors.hpp"
#include "omab/report.hpp"
#include "omab/seeding.hpp"

namespace omab {

const char* scenario_name(LoadScenario scenario) {
  return scenario == LoadScenario::PurchasingPower ? "purchase" : "traffic";
}

namespace {

class LognormalStream final : public LoadStream {
 public:
  explicit LognormalStream(const PurchaseLoadParams& params) : params_(params) {
    if (!(params.sigma > 0.0)) throw std::invalid_argument("load stream: sigma must be > 0");
    if (!(params.p0 >= 0.0 && params.p0 <= 1.0)) throw std::invalid_argument("load stream: p0 must be in [0,1]");
  }
  double next(std::mt19937_64& rng) override { return gen_purchase_load(rng, params_); }

 private:
  PurchaseLoadParams params_;
};

class BimodalStream final : public LoadStream {
 public:
  explicit BimodalStream(const BimodalLoadParams& params) : params_(params) {
    if (!(params.p_low > 0.0 && params.p_low < 1.0))
      throw std::invalid_argument("bimodal_load_stream: p_low must be in (0,1)");
    if (!(params.low < params.high)) throw std::invalid_argument("bimodal_load_stream: low must be < high");
  }
  double next(std::mt19937_64& rng) override {
    return std::bernoulli_distribution(params_.p_low)(rng) ? params_.low : params_.high;
  }

 private:
  BimodalLoadParams params_;
};

std::int64_t draw_interval_count(std::mt19937_64& rng, const TrafficLoadParams& params) {
  const double raw = std::lognormal_distribution<double>(params.rate_mu, params.rate_sigma)(rng);
  const auto rounded = static_cast<std::int64_t>(std::llround(raw));
  return std::clamp<std::int64_t>(rounded, 1, params.interval_seconds);
}

// Event-level traffic loads: a random event lands in an interval with
// probability proportional to that interval's count, so the stream yields
// N copies of N for each drawn interval.
class TrafficStream final : public LoadStream {
 public:
  explicit TrafficStream(const TrafficLoadParams& params) : params_(params) {
    if (params.interval_seconds <= 0)
      throw std::invalid_argument("load stream: interval_seconds must be > 0");
    if (!(params.rate_sigma > 0.0)) throw std::invalid_argument("load stream: rate_sigma must be > 0");
  }
  double next(std::mt19937_64& rng) override {
    if (remaining_ == 0) {
      remaining_ = draw_interval_count(rng, params_);
      current_ = static_cast<double>(remaining_);
    }
    --remaining_;
    return current_;
  }

 private:
  TrafficLoadParams params_;
  std::int64_t remaining_ = 0;
  double current_ = 0.0;
};

void validate_spec(const SyntheticSpec& spec) {
  if (spec.num_arms < 1) throw std::invalid_argument("SyntheticSpec: need at least one arm");
  if (spec.ctr.size() != static_cast<std::size_t>(spec.num_arms))
    throw std::invalid_argument("SyntheticSpec: ctr length must equal num_arms");
  for (double c : spec.ctr)
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("SyntheticSpec: ctr outside [0,1]");
  if (spec.n_events < spec.num_arms) throw std::invalid_argument("SyntheticSpec: n_events must be >= num_arms");
  if (!(spec.rho > 0.0 && spec.rho < 0.5)) throw std::invalid_argument("SyntheticSpec: rho must be in (0, 0.5)");
}

constexpr std::int64_t kEpochBase = 1704067200;  // 2024-01-01T00:00:00Z

}  // namespace

std::unique_ptr<LoadStream> make_load_stream(const LoadModel& model) {
  if (model.scenario == LoadScenario::TrafficIntensity)
    return std::make_unique<TrafficStream>(model.traffic);
  if (model.distribution == LoadDistribution::Bimodal)
    return std::make_unique<BimodalStream>(model.bimodal);
  return std::make_unique<LognormalStream>(model.lognormal);
}

std::unique_ptr<LoadStream> bimodal_load_stream(double p_low, double low, double high) {
  return std::make_unique<BimodalStream>(BimodalLoadParams{p_low, low, high});
}

std::vector<LoggedEvent> generate_log(const SyntheticSpec& spec) {
  validate_spec(spec);
  std::mt19937_64 rng(spec.seed);
  const auto n = static_cast<std::size_t>(spec.n_events);

  std::vector<std::int64_t> timestamps;
  std::vector<double> loads;
  timestamps.reserve(n);
  loads.reserve(n);

  if (spec.load.scenario == LoadScenario::TrafficIntensity) {
    const auto& traffic = spec.load.traffic;
    std::int64_t interval_start = kEpochBase;
    while (timestamps.size() < n) {
      const std::int64_t count = draw_interval_count(rng, traffic);
      for (std::int64_t j = 0; j < count && timestamps.size() < n; ++j)
        timestamps.push_back(interval_start + j * traffic.interval_seconds / count);
      interval_start += traffic.interval_seconds;
    }
    loads = gen_traffic_load(timestamps, traffic.interval_seconds);
  } else {
    auto stream = make_load_stream(spec.load);
    for (std::size_t i = 0; i < n; ++i) {
      timestamps.push_back(kEpochBase + static_cast<std::int64_t>(i));
      loads.push_back(stream->next(rng));
    }
    loads = impute_missing(loads);
  }

  const LoadNormalizer norm = fit_thresholds(loads, spec.rho);

  std::vector<LoggedEvent> events(n);
  std::uniform_int_distribution<ArmId> arm_dist(0, spec.num_arms - 1);
  for (std::size_t i = 0; i < n; ++i) {
    LoggedEvent& e = events[i];
    e.timestamp = timestamps[i];
    e.load = loads[i];
    e.normalized_load = normalize(norm, loads[i]);
    e.arm = arm_dist(rng);
    e.reward = std::bernoulli_distribution(spec.ctr[static_cast<std::size_t>(e.arm)])(rng) ? 1 : 0;
  }
  return events;
}

OnlineResult simulate_online(Policy& policy, const SyntheticSpec& spec, std::int64_t T) {
  validate_spec(spec);
  if (T < 1) throw std::invalid_argument("simulate_online: T must be >= 1");
  if (policy.num_arms() != spec.num_arms)
    throw std::invalid_argument("simulate_online: policy arm count does not match spec");
  const GroundTruth gt = GroundTruth::from_ctr(spec.ctr);

  // Calibrate the normalizer and imputation mean on a separate stream so the
  // online loop sees the same preprocessing as a replayed log.
  std::mt19937_64 cal_rng(derive_seed(spec.seed, "online-cal", 0));
  auto cal_stream = make_load_stream(spec.load);
  const auto n_cal = static_cast<std::size_t>(std::clamp<std::int64_t>(spec.n_events, 1000, 200000));
  std::vector<double> sample(n_cal);
  for (auto& v : sample) v = cal_stream->next(cal_rng);
  double known_sum = 0.0;
  std::size_t known = 0;
  for (double v : sample)
    if (!is_missing_load(v)) {
      known_sum += v;
      ++known;
    }
  if (known == 0) throw DataError("simulate_online: calibration stream produced only missing loads");
  const double imputation_mean = known_sum / static_cast<double>(known);
  const LoadNormalizer norm = fit_thresholds(impute_missing(sample), spec.rho);

  std::mt19937_64 rng(derive_seed(spec.seed, "online-env", 0));
  auto stream = make_load_stream(spec.load);

  OnlineResult result;
  result.cumulative_regret.reserve(static_cast<std::size_t>(T));
  result.cumulative_clicks.reserve(static_cast<std::size_t>(T));
  result.cumulative_regret_realized.reserve(static_cast<std::size_t>(T));
  double regret = 0.0;
  double clicks = 0.0;
  double regret_realized = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) {
    double load = stream->next(rng);
    if (is_missing_load(load)) load = imputation_mean;
    const double normalized = normalize(norm, load);
    const ArmId arm = policy.select(normalized, static_cast<std::uint64_t>(t));
    const int reward = std::bernoulli_distribution(spec.ctr[static_cast<std::size_t>(arm)])(rng) ? 1 : 0;
    policy.update(arm, reward);
    regret += regret_step(load, arm, gt);
    clicks += static_cast<double>(reward);
    regret_realized += load * (gt.best_ctr - static_cast<double>(reward));
    result.cumulative_regret.push_back(regret);
    result.cumulative_clicks.push_back(clicks);
    result.cumulative_regret_realized.push_back(regret_realized);
  }
  return result;
}

}  // namespace omab
