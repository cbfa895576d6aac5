#include "omab/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>

#include "omab/errors.hpp"
#include "omab/ingest.hpp"
#include "omab/runner.hpp"
#include "omab/seeding.hpp"

namespace omab {

namespace {

void echo_resolved_config(const ExperimentConfig& cfg, const std::string& resolved) {
  if (resolved.empty()) return;
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(cfg.out_dir / "resolved_config.ini");
  if (!out) throw DataError("cannot write resolved config under " + cfg.out_dir.string());
  out << resolved;
}

void print_final_table(const AggregateResult& agg, std::ostream& diag) {
  diag << "policy            final_regret_mean  final_regret_std  retention\n";
  for (const auto& pa : agg.policies) {
    diag << std::left << std::setw(18) << pa.policy << std::setw(19) << format_sig10(pa.final_regret_mean)
         << std::setw(18) << format_sig10(pa.final_regret_std) << format_sig10(pa.retention_rate_mean)
         << '\n';
  }
}

}  // namespace

std::filesystem::path cmd_generate(const ExperimentConfig& cfg, std::ostream& diag) {
  SyntheticSpec spec = cfg.synth;
  spec.seed = derive_seed(cfg.base_seed, "log", 0);
  const auto events = generate_log(spec);

  std::filesystem::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / ("events_" + cfg.scenario() + ".csv");
  write_event_log(path, events);

  std::vector<std::uint64_t> shows(static_cast<std::size_t>(spec.num_arms), 0);
  std::vector<std::uint64_t> clicks(static_cast<std::size_t>(spec.num_arms), 0);
  for (const auto& e : events) {
    shows[static_cast<std::size_t>(e.arm)] += 1;
    clicks[static_cast<std::size_t>(e.arm)] += static_cast<std::uint64_t>(e.reward);
  }
  diag << "wrote " << events.size() << " events to " << path.string() << "\n";
  diag << "arm  displays  clicks  empirical_ctr\n";
  for (int k = 0; k < spec.num_arms; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const double ctr = shows[idx] > 0 ? static_cast<double>(clicks[idx]) / static_cast<double>(shows[idx]) : 0.0;
    diag << k << "    " << shows[idx] << "  " << clicks[idx] << "  " << format_sig10(ctr) << '\n';
  }
  return path;
}

void cmd_replay(const ExperimentConfig& cfg, const std::string& resolved_config, std::ostream& diag) {
  const auto output = run_grid(cfg, default_cells(cfg));
  const auto agg = aggregate(std::span<const RunSummary>(output.runs), output.gt);
  std::filesystem::create_directories(cfg.out_dir);
  echo_resolved_config(cfg, resolved_config);
  const auto json_path = export_aggregate(agg, cfg.out_dir, cfg.scenario());
  diag << "exported " << json_path.string() << "\n";
  print_final_table(agg, diag);
}

void cmd_sweep(const ExperimentConfig& cfg, const std::string& resolved_config, std::ostream& diag) {
  if (cfg.alpha_grid.empty()) throw std::invalid_argument("sweep: alpha grid must be non-empty");

  std::vector<GridCell> cells;
  for (PolicyKind kind : cfg.policies) {
    const bool uses_alpha = kind == PolicyKind::Ucb1 || kind == PolicyKind::AdaUcb;
    if (!uses_alpha) {
      cells.push_back({policy_name(kind), kind, cfg.params});
      continue;
    }
    if (cfg.alpha_grid.size() == 1) {
      // Singleton grids keep the plain label so outputs line up with cmd_replay.
      PolicyParams p = cfg.params;
      p.alpha = cfg.alpha_grid.front();
      cells.push_back({policy_name(kind), kind, p});
      continue;
    }
    for (double alpha : cfg.alpha_grid) {
      PolicyParams p = cfg.params;
      p.alpha = alpha;
      cells.push_back({std::string(policy_name(kind)) + "_a" + format_sig10(alpha), kind, p});
    }
  }

  const auto output = run_grid(cfg, cells);
  const auto agg = aggregate(std::span<const RunSummary>(output.runs), output.gt);
  std::filesystem::create_directories(cfg.out_dir);
  echo_resolved_config(cfg, resolved_config);
  export_aggregate(agg, cfg.out_dir, cfg.scenario());

  std::map<std::string, const PolicyAggregate*> by_label;
  for (const auto& pa : agg.policies) by_label[pa.policy] = &pa;
  const std::string suffix = cfg.scenario() + "_seeds" + std::to_string(cfg.seeds);

  std::ofstream table(cfg.out_dir / ("sweep_" + suffix + ".csv"));
  std::ofstream best(cfg.out_dir / ("best_alpha_" + suffix + ".csv"));
  if (!table || !best) throw DataError("sweep: cannot write under " + cfg.out_dir.string());
  table << "policy,alpha,final_regret_mean,final_regret_std\n";
  best << "policy,best_alpha,final_regret_mean\n";
  diag << "policy  best_alpha  final_regret_mean\n";

  for (PolicyKind kind : cfg.policies) {
    const bool uses_alpha = kind == PolicyKind::Ucb1 || kind == PolicyKind::AdaUcb;
    if (!uses_alpha) {
      const auto* pa = by_label.at(policy_name(kind));
      table << pa->policy << ",," << format_sig10(pa->final_regret_mean) << ','
            << format_sig10(pa->final_regret_std) << '\n';
      continue;
    }
    double best_alpha = cfg.alpha_grid.front();
    double best_regret = std::numeric_limits<double>::infinity();
    for (double alpha : cfg.alpha_grid) {
      const std::string label = cfg.alpha_grid.size() == 1
                                    ? std::string(policy_name(kind))
                                    : std::string(policy_name(kind)) + "_a" + format_sig10(alpha);
      const auto* pa = by_label.at(label);
      table << policy_name(kind) << ',' << format_sig10(alpha) << ',' << format_sig10(pa->final_regret_mean)
            << ',' << format_sig10(pa->final_regret_std) << '\n';
      if (pa->final_regret_mean < best_regret) {
        best_regret = pa->final_regret_mean;
        best_alpha = alpha;
      }
    }
    best << policy_name(kind) << ',' << format_sig10(best_alpha) << ',' << format_sig10(best_regret) << '\n';
    diag << policy_name(kind) << "  " << format_sig10(best_alpha) << "  " << format_sig10(best_regret) << '\n';
  }
}

void cmd_ingest(const ExperimentConfig& cfg, const std::vector<std::string>& inputs, std::ostream& diag) {
  if (inputs.empty()) throw std::invalid_argument("ingest: at least one input file required");
  IngestCounters counters;
  std::vector<RawRecord> records;
  for (const auto& path : inputs) {
    auto part = read_raw_records(std::filesystem::path(path), counters);
    records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  records = dedupe(std::move(records), &counters);
  auto events = join_clicks(records, &counters);
  if (!events.empty()) attach_load(events, cfg.synth.rho);

  std::filesystem::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / "events_ingested.csv";
  write_event_log(path, events);

  diag << "wrote " << events.size() << " events to " << path.string() << "\n"
       << "rows_read=" << counters.rows_read << " rows_unparseable=" << counters.rows_unparseable
       << " duplicates_removed=" << counters.duplicates_removed << "\n"
       << "displays=" << counters.displays << " clicks=" << counters.clicks
       << " clicks_matched=" << counters.clicks_matched << " clicks_unmatched=" << counters.clicks_unmatched
       << " clicks_duplicate=" << counters.clicks_duplicate << "\n";
}

}  // namespace omab
