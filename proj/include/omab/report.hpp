#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "omab/bandit.hpp"

namespace omab {

/// Per-step expected regret, weighted by the real load: L * (c* - c_chosen).
double regret_step(double load, ArmId chosen, const GroundTruth& gt);

/// Export grid: every ceil(T/1000)-th step, with the final step always
/// included exactly. Aggregation at grid points is exact; nothing is
/// interpolated or window-averaged.
std::vector<std::int64_t> downsample_steps(std::int64_t T);

/// Full-resolution outcome of one (policy, seed) run.
struct RunResult {
  std::string policy;
  std::uint64_t seed_index = 0;
  std::uint64_t run_seed = 0;
  std::int64_t T = 0;
  Eigen::VectorXd cumulative_regret;           // expectation form, length T
  Eigen::VectorXd cumulative_clicks;           // R_t, length T
  Eigen::VectorXd cumulative_regret_realized;  // secondary, length T
  Eigen::VectorXd ctr_estimates;               // K entries, NaN for unpulled arms
  std::uint64_t events_consumed = 0;
  int cycles = 0;
};

/// One run sampled onto the export grid; the compact record multi-seed
/// aggregation keeps per run.
struct RunSummary {
  std::string policy;
  std::uint64_t seed_index = 0;
  std::uint64_t run_seed = 0;
  std::int64_t T = 0;
  Eigen::VectorXd regret;           // values at downsample_steps(T)
  Eigen::VectorXd clicks;
  Eigen::VectorXd regret_realized;
  Eigen::VectorXd ctr_estimates;
  std::uint64_t events_consumed = 0;
  int cycles = 0;
};

RunSummary summarize(const RunResult& run, std::span<const std::int64_t> steps);

struct TrajectoryStat {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // sample stddev across seeds; zero for a single seed
};

struct PolicyAggregate {
  std::string policy;
  int seeds = 0;
  TrajectoryStat regret;
  TrajectoryStat clicks;
  TrajectoryStat regret_realized;
  Eigen::VectorXd ctr_mean;
  Eigen::VectorXd ctr_std;
  double final_regret_mean = 0.0;   // == regret.mean at the last grid point
  double final_regret_std = 0.0;
  double final_clicks_mean = 0.0;
  double final_clicks_std = 0.0;
  double retention_rate_mean = 0.0;  // retained / consumed, averaged over seeds
};

struct AggregateResult {
  std::int64_t T = 0;
  std::vector<std::int64_t> steps;
  std::vector<PolicyAggregate> policies;        // sorted by policy label
  std::vector<std::string> correlation_labels;  // policy labels + "GT" last
  Eigen::MatrixXd correlation;                  // Pearson across arms; NaN marks undefined
  GroundTruth gt;
};

/// Pointwise mean and sample stddev across seeds, grouped by policy label.
/// The across-seed reduction is pairwise in a fixed (policy, seed_index)
/// order, so results are reproducible no matter how runs were scheduled.
/// Throws std::invalid_argument on an empty input or mismatched T.
AggregateResult aggregate(std::span<const RunSummary> runs, const GroundTruth& gt);
AggregateResult aggregate(std::span<const RunResult> runs, const GroundTruth& gt);

/// Pearson correlation of two equal-length vectors; NaN when either has
/// zero variance or non-finite entries.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Spearman rank correlation (average ranks for ties).
double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Pearson correlation between every pair of per-policy CTR-estimate
/// vectors plus the ground-truth vector (labelled "GT", last row/column).
/// A vector with zero variance or missing entries gets NaN in its whole
/// row and column; other cells are unaffected. Requires K >= 2.
Eigen::MatrixXd ctr_correlation(const std::vector<std::pair<std::string, Eigen::VectorXd>>& estimates,
                                const GroundTruth& gt, std::vector<std::string>* labels = nullptr);

/// Writes under out_dir:
///   trajectory_<policy>_<scenario>_seeds<N>.csv
///     header: step,regret_mean,regret_std,clicks_mean,clicks_std,realized_regret_mean,realized_regret_std
///   final_regret_<scenario>_seeds<N>.csv
///     header: policy,seeds,final_regret_mean,final_regret_std,final_clicks_mean,final_clicks_std,retention_rate_mean
///   ctr_correlation_<scenario>_seeds<N>.csv   (label row + matrix rows)
///   aggregate_<scenario>_seeds<N>.json        (self-describing document)
/// Numbers use format_sig10; NaN serializes as "nan" in CSV and null in
/// JSON. Returns the JSON path.
std::filesystem::path export_aggregate(const AggregateResult& agg, const std::filesystem::path& out_dir,
                                       const std::string& scenario);

/// Parses a document written by export_aggregate.
AggregateResult import_aggregate_json(const std::filesystem::path& path);

}  // namespace omab
