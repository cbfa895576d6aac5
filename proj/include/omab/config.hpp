#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "omab/bandit.hpp"
#include "omab/simulate.hpp"

namespace omab {

/// Everything a run needs; resolved from config file + CLI flags, echoed
/// into the output directory so any result is reproducible from one file.
struct ExperimentConfig {
  // Data source: a real uniformly-logged file, or the synthetic spec when
  // log_path is empty. Synthetic runs draw one fresh log per seed index,
  // shared by every policy at that index.
  std::string log_path;
  SyntheticSpec synth;

  std::vector<PolicyKind> policies = {PolicyKind::Uniform, PolicyKind::Deg,  PolicyKind::Ts,
                                      PolicyKind::Ucb1,    PolicyKind::AdaUcb, PolicyKind::Optimal};
  PolicyParams params;
  std::vector<double> alpha_grid = {0.25, 0.5, 1.0, 2.0};  // sweep only

  std::int64_t T = 100000;
  int seeds = 1;
  std::uint64_t base_seed = 12345;
  int max_cycles = 100;
  int threads = 0;  // 0 = auto
  std::filesystem::path out_dir = "results";

  /// Scenario tag embedded in output filenames.
  std::string scenario() const {
    if (!log_path.empty()) return "real";
    return scenario_name(synth.load.scenario);
  }
};

/// Basic semantic validation; throws std::invalid_argument (usage errors).
void validate_config(const ExperimentConfig& cfg);

}  // namespace omab
