#include "omab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "omab/errors.hpp"
#include "omab/replay.hpp"
#include "omab/seeding.hpp"

namespace omab {

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.T < 1) throw std::invalid_argument("config: T must be >= 1");
  if (cfg.seeds < 1) throw std::invalid_argument("config: seeds must be >= 1");
  if (cfg.max_cycles < 1) throw std::invalid_argument("config: max_cycles must be >= 1");
  if (cfg.policies.empty()) throw std::invalid_argument("config: no policies selected");
  if (cfg.log_path.empty()) {
    if (cfg.synth.ctr.size() != static_cast<std::size_t>(cfg.synth.num_arms))
      throw std::invalid_argument("config: ctr length must equal K");
  } else if (!std::filesystem::exists(cfg.log_path)) {
    throw DataError("config: log file does not exist: " + cfg.log_path);
  }
}

std::vector<GridCell> default_cells(const ExperimentConfig& cfg) {
  std::vector<GridCell> cells;
  for (PolicyKind kind : cfg.policies) cells.push_back({policy_name(kind), kind, cfg.params});
  return cells;
}

namespace {

RunResult to_run_result(const GridCell& cell, std::uint64_t seed_index, std::uint64_t run_seed,
                        const ReplayResult& rr) {
  RunResult run;
  run.policy = cell.label;
  run.seed_index = seed_index;
  run.run_seed = run_seed;
  run.T = rr.valid_steps;
  const auto n = static_cast<Eigen::Index>(rr.valid_steps);
  run.cumulative_regret = Eigen::Map<const Eigen::VectorXd>(rr.cumulative_regret.data(), n);
  run.cumulative_clicks = Eigen::Map<const Eigen::VectorXd>(rr.cumulative_reward.data(), n);
  run.cumulative_regret_realized = Eigen::Map<const Eigen::VectorXd>(rr.cumulative_regret_realized.data(), n);
  run.ctr_estimates.resize(static_cast<Eigen::Index>(rr.final_stats.size()));
  for (std::size_t k = 0; k < rr.final_stats.size(); ++k)
    run.ctr_estimates(static_cast<Eigen::Index>(k)) =
        rr.final_stats[k].pulls > 0 ? rr.final_stats[k].mean() : std::numeric_limits<double>::quiet_NaN();
  run.events_consumed = rr.events_consumed;
  run.cycles = rr.cycles;
  return run;
}

}  // namespace

GridOutput run_grid(const ExperimentConfig& cfg, const std::vector<GridCell>& cells) {
  validate_config(cfg);
  if (cells.empty()) throw std::invalid_argument("run_grid: no cells");

  GridOutput out;
  out.steps = downsample_steps(cfg.T);

  const bool real_log = !cfg.log_path.empty();
  std::vector<LoggedEvent> shared_log;
  int num_arms = cfg.synth.num_arms;
  if (real_log) {
    shared_log = read_event_log(cfg.log_path);
    if (shared_log.empty()) throw DataError("run_grid: log " + cfg.log_path + " has no events");
    num_arms = infer_num_arms(shared_log);
    out.gt = empirical_ground_truth(shared_log, num_arms);
  } else {
    out.gt = GroundTruth::from_ctr(cfg.synth.ctr);
  }

  const auto n_seeds = static_cast<std::size_t>(cfg.seeds);
  std::vector<std::vector<RunSummary>> per_seed(n_seeds);
  std::vector<std::exception_ptr> errors(n_seeds);
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_seeds) return;
      try {
        std::vector<LoggedEvent> local_log;
        if (!real_log) {
          SyntheticSpec spec = cfg.synth;
          spec.seed = derive_seed(cfg.base_seed, "log", i);
          local_log = generate_log(spec);
        }
        const std::span<const LoggedEvent> log = real_log ? std::span<const LoggedEvent>(shared_log)
                                                          : std::span<const LoggedEvent>(local_log);
        for (const auto& cell : cells) {
          const std::uint64_t run_seed = derive_seed(cfg.base_seed, policy_name(cell.kind), i);
          auto policy = make_policy(cell.kind, num_arms, run_seed, cell.params, &out.gt);
          try {
            const ReplayResult rr = replay(*policy, log, cfg.T, out.gt, cfg.max_cycles);
            per_seed[i].push_back(summarize(to_run_result(cell, i, run_seed, rr), out.steps));
          } catch (const ReplayNonConvergence& e) {
            throw ReplayNonConvergence("policy " + cell.label + ", seed " + std::to_string(i) + ": " + e.what(),
                                       e.partial());
          }
        }
      } catch (...) {
        errors[i] = std::current_exception();
        return;
      }
    }
  };

  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::min(std::thread::hardware_concurrency(), 8u);
  n_threads = std::max(1u, std::min(n_threads, static_cast<unsigned>(n_seeds)));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  for (auto& seed_runs : per_seed)
    for (auto& run : seed_runs) out.runs.push_back(std::move(run));
  std::sort(out.runs.begin(), out.runs.end(), [](const RunSummary& a, const RunSummary& b) {
    if (a.policy != b.policy) return a.policy < b.policy;
    return a.seed_index < b.seed_index;
  });
  return out;
}

}  // namespace omab
