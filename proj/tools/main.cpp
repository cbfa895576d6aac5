#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "omab/commands.hpp"
#include "omab/errors.hpp"
#include "omab/replay.hpp"
#include "omab/runner.hpp"

namespace {

// Exit codes: 0 success, 1 usage, 2 data error, 3 non-convergence.
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNonConvergence = 3;

struct CliState {
  omab::ExperimentConfig cfg;
  std::vector<std::string> policy_names;
  std::vector<double> alphas;
  std::string scenario = "purchase";
  std::string load_dist = "lognormal";
  std::string out_dir;
  std::vector<std::string> ingest_inputs;
};

void add_common_options(CLI::App* cmd, CliState& st) {
  cmd->fallthrough();  // app-level flags (--config) may follow the subcommand
  cmd->add_option("--out", st.out_dir, "Output directory")->envname("OMAB_OUT");
  cmd->add_option("--base-seed", st.cfg.base_seed, "Base seed; all run seeds derive from it");
  cmd->add_option("--rho", st.cfg.synth.rho, "Quantile mass for load truncation, in (0, 0.5)");
}

void add_synth_options(CLI::App* cmd, CliState& st) {
  cmd->add_option("--scenario", st.scenario, "Load scenario")->check(CLI::IsMember({"purchase", "traffic"}));
  cmd->add_option("--K", st.cfg.synth.num_arms, "Number of arms");
  cmd->add_option("--ctr", st.cfg.synth.ctr, "True per-arm CTRs")->delimiter(',');
  cmd->add_option("--n-events", st.cfg.synth.n_events, "Synthetic log length");
  cmd->add_option("--interval-seconds", st.cfg.synth.load.traffic.interval_seconds,
                  "Traffic-load interval length");
  cmd->add_option("--load-dist", st.load_dist, "Purchase-load distribution")
      ->check(CLI::IsMember({"lognormal", "bimodal"}));
  cmd->add_option("--load-mu", st.cfg.synth.load.lognormal.mu, "Lognormal meanlog");
  cmd->add_option("--load-sigma", st.cfg.synth.load.lognormal.sigma, "Lognormal sdlog");
  cmd->add_option("--load-p0", st.cfg.synth.load.lognormal.p0, "Probability of missing purchase history");
  cmd->add_option("--load-p-low", st.cfg.synth.load.bimodal.p_low, "Bimodal: probability of the low load");
  cmd->add_option("--load-low", st.cfg.synth.load.bimodal.low, "Bimodal: low load value");
  cmd->add_option("--load-high", st.cfg.synth.load.bimodal.high, "Bimodal: high load value");
  cmd->add_option("--rate-mu", st.cfg.synth.load.traffic.rate_mu, "Traffic: lognormal meanlog of counts");
  cmd->add_option("--rate-sigma", st.cfg.synth.load.traffic.rate_sigma, "Traffic: lognormal sdlog of counts");
}

void add_run_options(CLI::App* cmd, CliState& st) {
  cmd->add_option("--log", st.cfg.log_path, "Replay a real canonical event log instead of synthetic data");
  cmd->add_option("--policies", st.policy_names, "Policies: uniform,deg,ts,ucb1,adaucb,optimal")
      ->delimiter(',');
  cmd->add_option("--alpha", st.alphas, "UCB confidence width (repeatable; sweep treats it as the grid)");
  cmd->add_option("--epsilon0", st.cfg.params.epsilon0, "DEG initial exploration rate");
  cmd->add_option("--tau", st.cfg.params.tau, "DEG decay horizon");
  cmd->add_option("--T", st.cfg.T, "Retained (valid) events per run");
  cmd->add_option("--seeds", st.cfg.seeds, "Seed count");
  cmd->add_option("--max-cycles", st.cfg.max_cycles, "Max full passes over the log before giving up");
  cmd->add_option("--threads", st.cfg.threads, "Worker threads (0 = auto)");
}

void finalize(CliState& st, bool sweep_mode) {
  if (!st.out_dir.empty()) st.cfg.out_dir = st.out_dir;
  st.cfg.synth.load.scenario = st.scenario == "traffic" ? omab::LoadScenario::TrafficIntensity
                                                        : omab::LoadScenario::PurchasingPower;
  st.cfg.synth.load.distribution = st.load_dist == "bimodal" ? omab::LoadDistribution::Bimodal
                                                             : omab::LoadDistribution::Lognormal;
  if (!st.policy_names.empty()) {
    st.cfg.policies.clear();
    for (const auto& name : st.policy_names) {
      const auto kind = omab::policy_from_name(name);
      if (!kind) throw std::invalid_argument("unknown policy '" + name + "'");
      st.cfg.policies.push_back(*kind);
    }
  }
  if (!st.alphas.empty()) {
    if (sweep_mode) {
      st.cfg.alpha_grid = st.alphas;
    } else {
      if (st.alphas.size() > 1)
        throw std::invalid_argument("replay takes a single --alpha; use the sweep subcommand for a grid");
      st.cfg.params.alpha = st.alphas.front();
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"omab — opportunistic multi-armed bandit experimentation harness"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a config file ([subcommand] sections, key=value)");

  CliState st;
  auto* generate = app.add_subcommand("generate", "Write a synthetic uniformly-logged event stream");
  add_common_options(generate, st);
  add_synth_options(generate, st);

  auto* replay = app.add_subcommand("replay", "Evaluate policies offline on a uniformly-logged stream");
  add_common_options(replay, st);
  add_synth_options(replay, st);
  add_run_options(replay, st);

  auto* sweep = app.add_subcommand("sweep", "Replay over an alpha grid and report the best alpha per policy");
  add_common_options(sweep, st);
  add_synth_options(sweep, st);
  add_run_options(sweep, st);

  auto* ingest = app.add_subcommand("ingest", "Preprocess raw click/display logs into the canonical format");
  add_common_options(ingest, st);
  ingest->add_option("inputs", st.ingest_inputs, "Raw input files")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    finalize(st, sweep->parsed());
    const std::string resolved = app.config_to_str(true, true);
    if (generate->parsed()) {
      omab::cmd_generate(st.cfg, std::cout);
    } else if (replay->parsed()) {
      omab::cmd_replay(st.cfg, resolved, std::cout);
    } else if (sweep->parsed()) {
      omab::cmd_sweep(st.cfg, resolved, std::cout);
    } else if (ingest->parsed()) {
      omab::cmd_ingest(st.cfg, st.ingest_inputs, std::cout);
    }
  } catch (const omab::ReplayNonConvergence& e) {
    std::cerr << "error (non-convergence): " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const omab::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
