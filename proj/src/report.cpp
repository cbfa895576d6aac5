#include "omab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "omab/errors.hpp"
#include "omab/event_log.hpp"

namespace omab {

using json = nlohmann::json;

double regret_step(double load, ArmId chosen, const GroundTruth& gt) {
  if (chosen < 0 || chosen >= gt.num_arms()) throw std::invalid_argument("regret_step: arm out of range");
  return load * (gt.best_ctr - gt.ctr[static_cast<std::size_t>(chosen)]);
}

std::vector<std::int64_t> downsample_steps(std::int64_t T) {
  if (T < 1) throw std::invalid_argument("downsample_steps: T must be >= 1");
  const std::int64_t stride = (T + 999) / 1000;
  std::vector<std::int64_t> steps;
  for (std::int64_t s = stride; s < T; s += stride) steps.push_back(s);
  steps.push_back(T);  // exact final value always retained
  return steps;
}

RunSummary summarize(const RunResult& run, std::span<const std::int64_t> steps) {
  if (run.T != run.cumulative_regret.size())
    throw std::invalid_argument("summarize: trajectory length does not match T");
  RunSummary s;
  s.policy = run.policy;
  s.seed_index = run.seed_index;
  s.run_seed = run.run_seed;
  s.T = run.T;
  s.ctr_estimates = run.ctr_estimates;
  s.events_consumed = run.events_consumed;
  s.cycles = run.cycles;
  const auto n = static_cast<Eigen::Index>(steps.size());
  s.regret.resize(n);
  s.clicks.resize(n);
  s.regret_realized.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto idx = static_cast<Eigen::Index>(steps[static_cast<std::size_t>(i)] - 1);
    if (idx < 0 || idx >= run.T) throw std::invalid_argument("summarize: step outside [1, T]");
    s.regret(i) = run.cumulative_regret(idx);
    s.clicks(i) = run.cumulative_clicks(idx);
    s.regret_realized(i) = run.cumulative_regret_realized(idx);
  }
  return s;
}

namespace {

Eigen::VectorXd pairwise_sum(const std::vector<const Eigen::VectorXd*>& xs, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return *xs[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(xs, lo, mid) + pairwise_sum(xs, mid, hi);
}

template <typename Select>
TrajectoryStat trajectory_stat(const std::vector<const RunSummary*>& runs, Select select) {
  std::vector<const Eigen::VectorXd*> vecs;
  vecs.reserve(runs.size());
  for (const auto* r : runs) vecs.push_back(&select(*r));
  const auto n = static_cast<double>(vecs.size());

  TrajectoryStat stat;
  stat.mean = pairwise_sum(vecs, 0, vecs.size()) / n;
  if (vecs.size() < 2) {
    stat.stddev = Eigen::VectorXd::Zero(stat.mean.size());
    return stat;
  }
  std::vector<Eigen::VectorXd> sq;
  sq.reserve(vecs.size());
  std::vector<const Eigen::VectorXd*> sq_ptrs;
  sq_ptrs.reserve(vecs.size());
  for (const auto* v : vecs) {
    sq.push_back((*v - stat.mean).cwiseAbs2());
    sq_ptrs.push_back(&sq.back());
  }
  const Eigen::VectorXd var = pairwise_sum(sq_ptrs, 0, sq_ptrs.size()) / (n - 1.0);
  stat.stddev = var.cwiseMax(0.0).cwiseSqrt();
  return stat;
}

bool correlation_defined(const Eigen::VectorXd& v) {
  // Constant vectors have zero variance; comparing extrema avoids calling a
  // vector "defined" on rounding noise from the mean subtraction.
  return v.allFinite() && v.maxCoeff() > v.minCoeff();
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v(i)))
      arr.push_back(v(i));
    else
      arr.push_back(nullptr);  // NaN/undefined serializes as null
  }
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& x : arr) v(i++) = x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>();
  return v;
}

std::string csv_number(double v) {
  return std::isfinite(v) ? format_sig10(v) : std::string("nan");
}

}  // namespace

AggregateResult aggregate(std::span<const RunSummary> runs, const GroundTruth& gt) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  const std::int64_t T = runs.front().T;
  std::map<std::string, std::vector<const RunSummary*>> by_policy;
  for (const auto& r : runs) {
    if (r.T != T) throw std::invalid_argument("aggregate: runs disagree on T");
    by_policy[r.policy].push_back(&r);
  }
  // Fixed reduction order regardless of how the runs were produced.
  for (auto& [name, group] : by_policy)
    std::sort(group.begin(), group.end(), [](const RunSummary* a, const RunSummary* b) {
      return a->seed_index < b->seed_index;
    });

  AggregateResult agg;
  agg.T = T;
  agg.steps = downsample_steps(T);
  agg.gt = gt;
  if (static_cast<std::size_t>(runs.front().regret.size()) != agg.steps.size())
    throw std::invalid_argument("aggregate: summaries were sampled on a different grid");

  std::vector<std::pair<std::string, Eigen::VectorXd>> estimates;
  for (const auto& [name, group] : by_policy) {
    PolicyAggregate pa;
    pa.policy = name;
    pa.seeds = static_cast<int>(group.size());
    pa.regret = trajectory_stat(group, [](const RunSummary& r) -> const Eigen::VectorXd& { return r.regret; });
    pa.clicks = trajectory_stat(group, [](const RunSummary& r) -> const Eigen::VectorXd& { return r.clicks; });
    pa.regret_realized =
        trajectory_stat(group, [](const RunSummary& r) -> const Eigen::VectorXd& { return r.regret_realized; });
    const auto ctr =
        trajectory_stat(group, [](const RunSummary& r) -> const Eigen::VectorXd& { return r.ctr_estimates; });
    pa.ctr_mean = ctr.mean;
    pa.ctr_std = ctr.stddev;
    const Eigen::Index last = pa.regret.mean.size() - 1;
    pa.final_regret_mean = pa.regret.mean(last);
    pa.final_regret_std = pa.regret.stddev(last);
    pa.final_clicks_mean = pa.clicks.mean(last);
    pa.final_clicks_std = pa.clicks.stddev(last);
    double retention = 0.0;
    for (const auto* r : group)
      retention += static_cast<double>(r->T) / static_cast<double>(r->events_consumed);
    pa.retention_rate_mean = retention / static_cast<double>(group.size());
    estimates.emplace_back(name, pa.ctr_mean);
    agg.policies.push_back(std::move(pa));
  }
  agg.correlation = ctr_correlation(estimates, gt, &agg.correlation_labels);
  return agg;
}

AggregateResult aggregate(std::span<const RunResult> runs, const GroundTruth& gt) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  const auto steps = downsample_steps(runs.front().T);
  std::vector<RunSummary> summaries;
  summaries.reserve(runs.size());
  for (const auto& r : runs) summaries.push_back(summarize(r, steps));
  return aggregate(summaries, gt);
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson: need two equal-length vectors");
  if (!correlation_defined(x) || !correlation_defined(y)) return std::numeric_limits<double>::quiet_NaN();
  const Eigen::ArrayXd dx = x.array() - x.mean();
  const Eigen::ArrayXd dy = y.array() - y.mean();
  return (dx * dy).sum() / std::sqrt(dx.abs2().sum() * dy.abs2().sum());
}

namespace {

Eigen::VectorXd average_ranks(const Eigen::VectorXd& v) {
  const auto n = static_cast<std::size_t>(v.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v(static_cast<Eigen::Index>(a)) < v(static_cast<Eigen::Index>(b)); });
  Eigen::VectorXd ranks(v.size());
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v(static_cast<Eigen::Index>(order[j + 1])) == v(static_cast<Eigen::Index>(order[i]))) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks(static_cast<Eigen::Index>(order[k])) = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length vectors");
  if (!x.allFinite() || !y.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  return pearson(average_ranks(x), average_ranks(y));
}

Eigen::MatrixXd ctr_correlation(const std::vector<std::pair<std::string, Eigen::VectorXd>>& estimates,
                                const GroundTruth& gt, std::vector<std::string>* labels) {
  if (gt.num_arms() < 2) throw std::invalid_argument("ctr_correlation: need at least 2 arms");
  std::vector<std::pair<std::string, Eigen::VectorXd>> all = estimates;
  all.emplace_back("GT", Eigen::Map<const Eigen::VectorXd>(gt.ctr.data(), static_cast<Eigen::Index>(gt.ctr.size())));
  for (const auto& [name, v] : all)
    if (v.size() != static_cast<Eigen::Index>(gt.ctr.size()))
      throw std::invalid_argument("ctr_correlation: estimate vector '" + name + "' has wrong length");

  const auto n = static_cast<Eigen::Index>(all.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool def_i = correlation_defined(all[static_cast<std::size_t>(i)].second);
    for (Eigen::Index j = 0; j <= i; ++j) {
      double c;
      if (!def_i || !correlation_defined(all[static_cast<std::size_t>(j)].second))
        c = std::numeric_limits<double>::quiet_NaN();
      else if (i == j)
        c = 1.0;
      else
        c = pearson(all[static_cast<std::size_t>(i)].second, all[static_cast<std::size_t>(j)].second);
      m(i, j) = c;
      m(j, i) = c;
    }
  }
  if (labels != nullptr) {
    labels->clear();
    for (const auto& [name, v] : all) labels->push_back(name);
  }
  return m;
}

std::filesystem::path export_aggregate(const AggregateResult& agg, const std::filesystem::path& out_dir,
                                       const std::string& scenario) {
  if (agg.policies.empty()) throw std::invalid_argument("export_aggregate: empty policy set");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::string suffix = scenario + "_seeds" + std::to_string(agg.policies.front().seeds);

  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw DataError("export_aggregate: cannot open " + p.string());
    return out;
  };

  for (const auto& pa : agg.policies) {
    auto out = open(out_dir / ("trajectory_" + pa.policy + "_" + suffix + ".csv"));
    out << "step,regret_mean,regret_std,clicks_mean,clicks_std,realized_regret_mean,realized_regret_std\n";
    for (std::size_t i = 0; i < agg.steps.size(); ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      out << agg.steps[i] << ',' << csv_number(pa.regret.mean(idx)) << ',' << csv_number(pa.regret.stddev(idx))
          << ',' << csv_number(pa.clicks.mean(idx)) << ',' << csv_number(pa.clicks.stddev(idx)) << ','
          << csv_number(pa.regret_realized.mean(idx)) << ',' << csv_number(pa.regret_realized.stddev(idx))
          << '\n';
    }
    if (!out) throw DataError("export_aggregate: write failed under " + out_dir.string());
  }

  {
    auto out = open(out_dir / ("final_regret_" + suffix + ".csv"));
    out << "policy,seeds,final_regret_mean,final_regret_std,final_clicks_mean,final_clicks_std,"
           "retention_rate_mean\n";
    for (const auto& pa : agg.policies)
      out << pa.policy << ',' << pa.seeds << ',' << csv_number(pa.final_regret_mean) << ','
          << csv_number(pa.final_regret_std) << ',' << csv_number(pa.final_clicks_mean) << ','
          << csv_number(pa.final_clicks_std) << ',' << csv_number(pa.retention_rate_mean) << '\n';
  }

  {
    auto out = open(out_dir / ("ctr_correlation_" + suffix + ".csv"));
    out << "label";
    for (const auto& l : agg.correlation_labels) out << ',' << l;
    out << '\n';
    for (Eigen::Index i = 0; i < agg.correlation.rows(); ++i) {
      out << agg.correlation_labels[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < agg.correlation.cols(); ++j) out << ',' << csv_number(agg.correlation(i, j));
      out << '\n';
    }
  }

  json doc;
  doc["schema"] = "omab.aggregate.v1";
  doc["T"] = agg.T;
  doc["steps"] = agg.steps;
  doc["ground_truth"] = {{"ctr", agg.gt.ctr}, {"best_ctr", agg.gt.best_ctr}, {"best_arm", agg.gt.best_arm}};
  doc["policies"] = json::array();
  for (const auto& pa : agg.policies) {
    json p;
    p["policy"] = pa.policy;
    p["seeds"] = pa.seeds;
    p["regret_mean"] = vector_to_json(pa.regret.mean);
    p["regret_std"] = vector_to_json(pa.regret.stddev);
    p["clicks_mean"] = vector_to_json(pa.clicks.mean);
    p["clicks_std"] = vector_to_json(pa.clicks.stddev);
    p["realized_regret_mean"] = vector_to_json(pa.regret_realized.mean);
    p["realized_regret_std"] = vector_to_json(pa.regret_realized.stddev);
    p["ctr_mean"] = vector_to_json(pa.ctr_mean);
    p["ctr_std"] = vector_to_json(pa.ctr_std);
    p["final_regret_mean"] = pa.final_regret_mean;
    p["final_regret_std"] = pa.final_regret_std;
    p["final_clicks_mean"] = pa.final_clicks_mean;
    p["final_clicks_std"] = pa.final_clicks_std;
    p["retention_rate_mean"] = pa.retention_rate_mean;
    doc["policies"].push_back(std::move(p));
  }
  json corr;
  corr["labels"] = agg.correlation_labels;
  corr["matrix"] = json::array();
  for (Eigen::Index i = 0; i < agg.correlation.rows(); ++i)
    corr["matrix"].push_back(vector_to_json(agg.correlation.row(i).transpose()));
  doc["correlation"] = std::move(corr);

  const auto json_path = out_dir / ("aggregate_" + suffix + ".json");
  auto out = open(json_path);
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("export_aggregate: write failed for " + json_path.string());
  return json_path;
}

AggregateResult import_aggregate_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("import_aggregate_json: cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("import_aggregate_json: " + path.string() + ": " + e.what());
  }
  if (doc.value("schema", "") != "omab.aggregate.v1")
    throw DataError("import_aggregate_json: unexpected schema in " + path.string());

  AggregateResult agg;
  agg.T = doc.at("T").get<std::int64_t>();
  agg.steps = doc.at("steps").get<std::vector<std::int64_t>>();
  agg.gt = GroundTruth::from_ctr(doc.at("ground_truth").at("ctr").get<std::vector<double>>());
  for (const auto& p : doc.at("policies")) {
    PolicyAggregate pa;
    pa.policy = p.at("policy").get<std::string>();
    pa.seeds = p.at("seeds").get<int>();
    pa.regret.mean = vector_from_json(p.at("regret_mean"));
    pa.regret.stddev = vector_from_json(p.at("regret_std"));
    pa.clicks.mean = vector_from_json(p.at("clicks_mean"));
    pa.clicks.stddev = vector_from_json(p.at("clicks_std"));
    pa.regret_realized.mean = vector_from_json(p.at("realized_regret_mean"));
    pa.regret_realized.stddev = vector_from_json(p.at("realized_regret_std"));
    pa.ctr_mean = vector_from_json(p.at("ctr_mean"));
    pa.ctr_std = vector_from_json(p.at("ctr_std"));
    pa.final_regret_mean = p.at("final_regret_mean").get<double>();
    pa.final_regret_std = p.at("final_regret_std").get<double>();
    pa.final_clicks_mean = p.at("final_clicks_mean").get<double>();
    pa.final_clicks_std = p.at("final_clicks_std").get<double>();
    pa.retention_rate_mean = p.at("retention_rate_mean").get<double>();
    agg.policies.push_back(std::move(pa));
  }
  agg.correlation_labels = doc.at("correlation").at("labels").get<std::vector<std::string>>();
  const auto& rows = doc.at("correlation").at("matrix");
  agg.correlation.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) agg.correlation.row(i++) = vector_from_json(row).transpose();
  return agg;
}

}  // namespace omab
