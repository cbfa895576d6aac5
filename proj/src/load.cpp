#include "omab/load.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "omab/errors.hpp"

namespace omab {

namespace {

// Nearest-rank order statistic index (1-based): ceil(p * n), clamped to [1, n].
std::size_t nearest_rank(double p, std::size_t n) {
  const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
  return std::min(std::max<std::size_t>(k, 1), n);
}

}  // namespace

LoadNormalizer fit_thresholds(std::span<const double> loads, double rho) {
  if (!(rho > 0.0 && rho < 0.5)) throw std::invalid_argument("fit_thresholds: rho must be in (0, 0.5)");
  const std::size_t n = loads.size();
  const auto min_samples = static_cast<std::size_t>(std::ceil(1.0 / rho));
  if (n < min_samples)
    throw DataError("fit_thresholds: need at least " + std::to_string(min_samples) +
                    " samples for rho=" + std::to_string(rho) + ", got " + std::to_string(n));

  std::vector<double> sorted;
  sorted.reserve(n);
  for (double v : loads) {
    if (is_missing_load(v)) throw DataError("fit_thresholds: missing load in input; impute first");
    sorted.push_back(v);
  }

  const std::size_t k_lo = nearest_rank(rho, n);
  const std::size_t k_hi = nearest_rank(1.0 - rho, n);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k_lo - 1), sorted.end());
  const double l_min = sorted[k_lo - 1];
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k_hi - 1), sorted.end());
  const double l_max = sorted[k_hi - 1];

  if (!(l_min < l_max))
    throw DataError("fit_thresholds: load quantiles coincide (l_min == l_max == " + std::to_string(l_min) +
                    "); the load is effectively constant and the normalized load is undefined. "
                    "Use a non-constant load model or rerun without load normalization.");
  return LoadNormalizer{l_min, l_max, rho};
}

double normalize(const LoadNormalizer& norm, double load) {
  const double clamped = std::clamp(load, norm.l_min, norm.l_max);
  return (clamped - norm.l_min) / (norm.l_max - norm.l_min);
}

double gen_purchase_load(std::mt19937_64& rng, const PurchaseLoadParams& params) {
  if (!(params.sigma > 0.0)) throw std::invalid_argument("gen_purchase_load: sigma must be > 0");
  if (!(params.p0 >= 0.0 && params.p0 <= 1.0))
    throw std::invalid_argument("gen_purchase_load: p0 must be in [0,1]");
  if (std::bernoulli_distribution(params.p0)(rng)) return missing_load();
  return std::lognormal_distribution<double>(params.mu, params.sigma)(rng);
}

std::vector<double> impute_missing(std::span<const double> loads) {
  double sum = 0.0;
  std::size_t known = 0;
  for (double v : loads) {
    if (!is_missing_load(v)) {
      sum += v;
      ++known;
    }
  }
  if (known == 0) throw DataError("impute_missing: every load is missing");
  const double mean = sum / static_cast<double>(known);

  std::vector<double> out(loads.begin(), loads.end());
  for (double& v : out)
    if (is_missing_load(v)) v = mean;
  return out;
}

std::vector<double> gen_traffic_load(std::span<const std::int64_t> timestamps,
                                     std::int64_t interval_seconds) {
  if (interval_seconds <= 0) throw std::invalid_argument("gen_traffic_load: interval_seconds must be > 0");
  std::vector<double> loads(timestamps.size());
  if (timestamps.empty()) return loads;

  auto bucket = [interval_seconds](std::int64_t ts) {
    std::int64_t q = ts / interval_seconds;
    if (ts % interval_seconds != 0 && ts < 0) --q;  // floor division
    return q;
  };

  std::size_t run_start = 0;
  std::int64_t run_bucket = bucket(timestamps[0]);
  for (std::size_t i = 1; i <= timestamps.size(); ++i) {
    if (i < timestamps.size() && timestamps[i] < timestamps[i - 1])
      throw DataError("gen_traffic_load: timestamps must be sorted non-decreasing");
    const std::int64_t b = i < timestamps.size() ? bucket(timestamps[i]) : run_bucket + 1;
    if (i == timestamps.size() || b != run_bucket) {
      const auto count = static_cast<double>(i - run_start);
      for (std::size_t j = run_start; j < i; ++j) loads[j] = count;
      run_start = i;
      run_bucket = b;
    }
  }
  return loads;
}

}  // namespace omab
