#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "omab/config.hpp"

namespace omab {

/// Writes the synthetic log to <out>/events_<scenario>.csv and prints a
/// per-arm empirical CTR summary. Deterministic: re-running with the same
/// config produces a byte-identical file. Returns the log path.
std::filesystem::path cmd_generate(const ExperimentConfig& cfg, std::ostream& diag);

/// Runs every configured policy x seed through replay, aggregates, and
/// exports tables under the output directory. resolved_config, when
/// non-empty, is echoed to <out>/resolved_config.ini.
void cmd_replay(const ExperimentConfig& cfg, const std::string& resolved_config, std::ostream& diag);

/// Alpha sweep over cfg.alpha_grid for the UCB-family policies (other
/// configured policies run once). Emits the per-alpha final-regret table
/// and the best-alpha row per policy.
void cmd_sweep(const ExperimentConfig& cfg, const std::string& resolved_config, std::ostream& diag);

/// Raw-log preprocessing: dedupe, click-display join, reward assignment,
/// load attachment. Inputs are concatenated before deduplication. Writes
/// <out>/events_ingested.csv and prints drop-count diagnostics.
void cmd_ingest(const ExperimentConfig& cfg, const std::vector<std::string>& inputs, std::ostream& diag);

}  // namespace omab
