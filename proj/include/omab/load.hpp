#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace omab {

/// Missing loads travel as NaN until impute_missing replaces them.
inline double missing_load() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing_load(double load) { return std::isnan(load); }

/// Truncation thresholds for mapping real loads into [0,1]:
///   normalized = (clamp(L, l_min, l_max) - l_min) / (l_max - l_min).
struct LoadNormalizer {
  double l_min = 0.0;
  double l_max = 1.0;
  double rho = 0.05;
};

/// Fits l_min and l_max as the nearest-rank rho- and (1-rho)-quantiles
/// (the ceil(p*n)-th order statistic) of the input loads.
///
/// Requires rho in (0, 0.5) and at least ceil(1/rho) samples. Throws
/// DataError when the two quantiles coincide: the load is effectively
/// constant, the normalized load is undefined, and the caller must switch
/// to a non-constant load model rather than assume 0.
LoadNormalizer fit_thresholds(std::span<const double> loads, double rho);

double normalize(const LoadNormalizer& norm, double load);

/// Customer purchasing power draws: lognormal(mu, sigma) with probability
/// 1 - p0, missing (no purchase history) with probability p0.
struct PurchaseLoadParams {
  double mu = 4.0;
  double sigma = 1.0;
  double p0 = 0.05;
};

double gen_purchase_load(std::mt19937_64& rng, const PurchaseLoadParams& params);

/// Replaces every missing entry by the arithmetic mean of the non-missing
/// ones; other entries are passed through unchanged. Throws DataError when
/// every entry is missing.
std::vector<double> impute_missing(std::span<const double> loads);

/// Per-event traffic load: each event's load is the number of events whose
/// timestamp falls in the same fixed interval, with interval boundaries
/// aligned to epoch multiples of interval_seconds. Timestamps must be
/// sorted non-decreasing.
std::vector<double> gen_traffic_load(std::span<const std::int64_t> timestamps,
                                     std::int64_t interval_seconds);

}  // namespace omab
