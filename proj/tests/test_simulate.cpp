#include <doctest.h>

#include <cmath>
#include <set>

#include "omab/errors.hpp"
#include "omab/replay.hpp"
#include "omab/simulate.hpp"
#include "support/test_policies.hpp"

using namespace omab;

TEST_CASE("generate_log: degenerate CTRs") {
  SyntheticSpec spec;
  spec.num_arms = 3;
  spec.ctr = {0.0, 0.0, 0.0};
  spec.n_events = 500;
  spec.seed = 3;
  spec.load.lognormal.p0 = 0.0;
  for (const auto& e : generate_log(spec)) CHECK(e.reward == 0);

  spec.num_arms = 2;
  spec.ctr = {1.0, 1.0};
  for (const auto& e : generate_log(spec)) CHECK(e.reward == 1);
}

TEST_CASE("generate_log: arm frequencies and click rates concentrate") {
  SyntheticSpec spec;
  spec.n_events = 300000;
  spec.seed = 5;
  const auto log = generate_log(spec);
  REQUIRE(log.size() == 300000);

  std::vector<double> shows(3, 0.0);
  std::vector<double> clicks(3, 0.0);
  std::int64_t prev_ts = -1;
  for (const auto& e : log) {
    shows[static_cast<std::size_t>(e.arm)] += 1;
    clicks[static_cast<std::size_t>(e.arm)] += e.reward;
    CHECK(e.timestamp > prev_ts);  // strictly increasing
    prev_ts = e.timestamp;
    CHECK(e.normalized_load >= 0.0);
    CHECK(e.normalized_load <= 1.0);
  }
  const double n = static_cast<double>(log.size());
  const double freq_sigma = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / n);
  for (int k = 0; k < 3; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    CHECK(std::abs(shows[idx] / n - 1.0 / 3.0) < 3.0 * freq_sigma);
    const double p = spec.ctr[idx];
    const double rate_sigma = std::sqrt(p * (1.0 - p) / shows[idx]);
    CHECK(std::abs(clicks[idx] / shows[idx] - p) < 3.0 * rate_sigma);
  }
}

TEST_CASE("generate_log is deterministic in the seed") {
  SyntheticSpec spec;
  spec.n_events = 2000;
  spec.seed = 77;
  const auto a = generate_log(spec);
  const auto b = generate_log(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].arm == b[i].arm);
    CHECK(a[i].reward == b[i].reward);
    CHECK(a[i].load == b[i].load);
    CHECK(a[i].normalized_load == b[i].normalized_load);
  }
  spec.seed = 78;
  const auto c = generate_log(spec);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) any_differs |= a[i].arm != c[i].arm;
  CHECK(any_differs);
}

TEST_CASE("generate_log traffic scenario: event loads equal interval counts") {
  SyntheticSpec spec;
  spec.n_events = 20000;
  spec.seed = 9;
  spec.load.scenario = LoadScenario::TrafficIntensity;
  spec.load.traffic.interval_seconds = 900;
  const auto log = generate_log(spec);

  std::vector<std::int64_t> timestamps;
  for (const auto& e : log) timestamps.push_back(e.timestamp);
  const auto recount = gen_traffic_load(timestamps, 900);
  for (std::size_t i = 0; i < log.size(); ++i) CHECK(log[i].load == recount[i]);
  std::set<std::int64_t> distinct(timestamps.begin(), timestamps.end());
  CHECK(distinct.size() == timestamps.size());
}

TEST_CASE("bimodal load stream: mean and post-normalization concentration") {
  auto stream = bimodal_load_stream(0.5, 1.0, 9.0);
  std::mt19937_64 rng(13);
  const int n = 100000;
  double sum = 0.0;
  std::vector<double> draws;
  draws.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double v = stream->next(rng);
    CHECK((v == 1.0 || v == 9.0));
    sum += v;
    draws.push_back(v);
  }
  const double mean = 0.5 * 1.0 + 0.5 * 9.0;
  const double sigma = 4.0 / std::sqrt(static_cast<double>(n));  // sd of a two-point draw is 4
  CHECK(std::abs(sum / n - mean) < 3.0 * sigma);

  // After Eq.-style fitting with rho < p_low, normalized loads are exactly {0,1}.
  const auto norm = fit_thresholds(draws, 0.05);
  CHECK(normalize(norm, 1.0) == 0.0);
  CHECK(normalize(norm, 9.0) == 1.0);

  CHECK_THROWS_AS(bimodal_load_stream(0.0, 1.0, 9.0), std::invalid_argument);
  CHECK_THROWS_AS(bimodal_load_stream(0.5, 9.0, 1.0), std::invalid_argument);
}

TEST_CASE("constant low bimodal stream (p_low -> 1) degenerates as expected") {
  auto stream = bimodal_load_stream(0.999999999, 1.0, 9.0);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(stream->next(rng) == 1.0);
}

TEST_CASE("simulate_online: Optimal policy has zero regret") {
  SyntheticSpec spec;
  spec.n_events = 50000;
  spec.seed = 21;
  const auto gt = GroundTruth::from_ctr(spec.ctr);
  OptimalPolicy policy(3, 4, gt);
  const auto result = simulate_online(policy, spec, 5000);
  for (double r : result.cumulative_regret) CHECK(r == 0.0);
}

TEST_CASE("simulate_online: Uniform regret matches the closed-form expectation") {
  SyntheticSpec spec;
  spec.num_arms = 3;
  spec.ctr = {0.02, 0.035, 0.05};
  spec.n_events = 100000;
  spec.seed = 23;
  spec.load.distribution = LoadDistribution::Bimodal;
  spec.load.bimodal = {0.5, 1.0, 9.0};

  const std::int64_t T = 40000;
  UniformPolicy policy(3, 6);
  const auto result = simulate_online(policy, spec, T);

  // Per step: E[L] * (c* - mean_k c_k) with E[L] = 5 for the bimodal load.
  const double mean_ctr = (0.02 + 0.035 + 0.05) / 3.0;
  const double expected_step = 5.0 * (0.05 - mean_ctr);
  const double expected_total = expected_step * static_cast<double>(T);
  // Conservative spread bound: per-step regret is bounded by high * gap.
  const double step_sd = 9.0 * 0.05;
  const double sigma = step_sd * std::sqrt(static_cast<double>(T));
  CHECK(std::abs(result.cumulative_regret.back() - expected_total) < 3.0 * sigma);
}

TEST_CASE("simulate_online value matches replay value for a fixed policy") {
  SyntheticSpec spec;
  spec.num_arms = 3;
  spec.ctr = {0.1, 0.3, 0.5};
  spec.n_events = 200000;
  spec.seed = 31;
  spec.load.lognormal.p0 = 0.1;

  const std::int64_t T = 15000;
  test::FixedArmPolicy online_policy(3, 1);
  const auto online = simulate_online(online_policy, spec, T);

  const auto log = generate_log(spec);
  const auto gt = GroundTruth::from_ctr(spec.ctr);
  test::FixedArmPolicy replay_policy(3, 1);
  const auto replayed = replay(replay_policy, log, T, gt);
  const double replay_value = replayed.cumulative_reward.back() / static_cast<double>(T);

  const double se = std::sqrt(2.0 * 0.3 * 0.7 / static_cast<double>(T));
  CHECK(std::abs(online.value() - replay_value) < 4.0 * se);
}

TEST_CASE("AdaUCB online regret grows sublinearly") {
  SyntheticSpec spec;
  spec.num_arms = 3;
  spec.ctr = {0.1, 0.2, 0.4};  // well separated
  spec.n_events = 100000;
  spec.load.distribution = LoadDistribution::Bimodal;
  spec.load.bimodal = {0.5, 1.0, 9.0};

  const std::int64_t T = 40000;
  double ratio_sum = 0.0;
  const int n_seeds = 8;
  for (int s = 0; s < n_seeds; ++s) {
    spec.seed = 100 + static_cast<std::uint64_t>(s);
    AdaUcbPolicy policy(3, 500 + static_cast<std::uint64_t>(s), 0.5);
    const auto result = simulate_online(policy, spec, T);
    const double half = result.cumulative_regret[static_cast<std::size_t>(T / 2 - 1)];
    const double full = result.cumulative_regret.back();
    REQUIRE(half > 0.0);
    ratio_sum += full / half;
  }
  CHECK(ratio_sum / n_seeds < 1.8);  // linear growth would give 2
}

TEST_CASE("simulate_online validates its inputs") {
  SyntheticSpec spec;
  UniformPolicy p2(2, 1);
  CHECK_THROWS_AS(simulate_online(p2, spec, 10), std::invalid_argument);  // K mismatch
  UniformPolicy p3(3, 1);
  CHECK_THROWS_AS(simulate_online(p3, spec, 0), std::invalid_argument);
  spec.ctr = {0.1, 0.2};
  CHECK_THROWS_AS(generate_log(spec), std::invalid_argument);  // ctr length != K
}
