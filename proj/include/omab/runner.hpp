#pragma once

#include <string>
#include <vector>

#include "omab/config.hpp"
#include "omab/report.hpp"

namespace omab {

/// One cell of the experiment grid: a labelled policy configuration run at
/// every seed index. Run seeds derive from (base_seed, policy name, seed
/// index); synthetic log seeds derive from (base_seed, "log", seed index).
struct GridCell {
  std::string label;
  PolicyKind kind;
  PolicyParams params;
};

struct GridOutput {
  std::vector<RunSummary> runs;  // sorted by (label, seed_index)
  GroundTruth gt;
  std::vector<std::int64_t> steps;
};

/// One cell per configured policy at the shared params.
std::vector<GridCell> default_cells(const ExperimentConfig& cfg);

/// Executes cells x seeds. Seed indices may run in a thread pool; each run
/// owns its policy and RNG and results are merged in a fixed order, so the
/// output is identical whatever the scheduling. Non-convergence surfaces as
/// ReplayNonConvergence with the failing (policy, seed) in the message.
GridOutput run_grid(const ExperimentConfig& cfg, const std::vector<GridCell>& cells);

}  // namespace omab
