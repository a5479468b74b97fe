#include "dcmm/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <thread>

#include "dcmm/errors.hpp"
#include "dcmm/inference.hpp"
#include "dcmm/io.hpp"
#include "dcmm/pipeline.hpp"
#include "dcmm/rng.hpp"
#include "dcmm/stats.hpp"

namespace dcmm {

namespace {

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto work = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  int spawn = std::min(workers, count);
  pool.reserve(static_cast<std::size_t>(spawn));
  for (int t = 0; t < spawn; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
}

// Substream layout per replicate: 0 = network sampling, 1 = bootstrap.
std::uint64_t replicate_seed(std::uint64_t master, int replicate, int purpose) {
  return rng::substream_seed(rng::substream_seed(master, static_cast<std::uint64_t>(replicate)),
                             static_cast<std::uint64_t>(purpose));
}

// Permutation aligning estimated community labels to the truth, matched on
// membership columns (sign flips of trailing eigenvectors can reflect the
// embedding, so vertex geometry is not comparable across contexts).
std::vector<int> align_communities(const Matrix& pi_hat, const Matrix& pi_truth) {
  return match_permutation(pi_hat.transpose(), pi_truth.transpose());
}

struct Aggregates {
  std::vector<double> values;
  int skipped = 0;
};

Aggregates collect(const std::vector<ReplicateRecord>& records,
                   const std::function<double(const ReplicateRecord&)>& value) {
  Aggregates agg;
  for (const auto& rec : records) {
    if (rec.ok)
      agg.values.push_back(value(rec));
    else
      ++agg.skipped;
  }
  return agg;
}

void finish_summary(ExperimentSummary& summary, const ExperimentConfig& cfg,
                    const Aggregates& agg,
                    std::chrono::steady_clock::time_point start) {
  summary.replicates = cfg.replicates;
  summary.seed = cfg.seed;
  summary.skipped = agg.skipped;
  summary.ok = agg.skipped * 20 <= cfg.replicates;  // 5% skip budget
  summary.mean = stats::mean(agg.values);
  summary.stddev = stats::sample_std(agg.values);
  summary.ks_distance = stats::ks_distance_to_normal(agg.values);
  summary.lag1_autocorr = stats::lag1_autocorrelation(agg.values);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "normality") return ExperimentKind::Normality;
  if (s == "rank_coverage") return ExperimentKind::RankCoverage;
  if (s == "twonode_calibration") return ExperimentKind::TwonodeCalibration;
  throw validation_error("unknown experiment '" + s +
                         "' (expected normality | rank_coverage | twonode_calibration)");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Normality: return "normality";
    case ExperimentKind::RankCoverage: return "rank_coverage";
    case ExperimentKind::TwonodeCalibration: return "twonode_calibration";
  }
  return "?";
}

double true_rank_of(const Matrix& pi, int node, int community) {
  double v = pi(node, community);
  int greater = 0;
  int equal = 0;
  for (int j = 0; j < pi.rows(); ++j) {
    if (pi(j, community) > v) ++greater;
    if (pi(j, community) == v) ++equal;  // includes the node itself
  }
  return 1.0 + greater + 0.5 * (equal - 1);
}

ExperimentSummary run_normality_experiment(const ExperimentConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  if (cfg.replicates < 1) throw validation_error("experiment: need replicates >= 1");
  validate(cfg.params);
  const double truth = cfg.params.pi(cfg.node, cfg.community);

  ExperimentSummary summary;
  summary.kind = ExperimentKind::Normality;
  summary.records.resize(static_cast<std::size_t>(cfg.replicates));
  parallel_for(cfg.replicates, cfg.workers, [&](int rep) {
    ReplicateRecord& rec = summary.records[static_cast<std::size_t>(rep)];
    rec.replicate = rep;
    try {
      AdjacencyMatrix x = sample_adjacency(cfg.params, replicate_seed(cfg.seed, rep, 0));
      PipelineResult pr = run_pipeline(x, cfg.params.k, cfg.phi);
      std::vector<int> perm = align_communities(pr.est.pi_hat, cfg.params.pi);
      rec.statistic = standardized_stat(cfg.node, perm[static_cast<std::size_t>(cfg.community)],
                                        pr.est, pr.ctx, truth);
      rec.ok = true;
    } catch (const degeneracy_error& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  });
  Aggregates agg = collect(summary.records, [](const ReplicateRecord& r) { return r.statistic; });
  finish_summary(summary, cfg, agg, start);
  return summary;
}

ExperimentSummary run_rank_coverage_experiment(const ExperimentConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  if (cfg.replicates < 1) throw validation_error("experiment: need replicates >= 1");
  validate(cfg.params);
  const double truth_rank = true_rank_of(cfg.params.pi, cfg.node, cfg.community);

  ExperimentSummary summary;
  summary.kind = ExperimentKind::RankCoverage;
  summary.records.resize(static_cast<std::size_t>(cfg.replicates));
  parallel_for(cfg.replicates, cfg.workers, [&](int rep) {
    ReplicateRecord& rec = summary.records[static_cast<std::size_t>(rep)];
    rec.replicate = rep;
    rec.true_rank = truth_rank;
    try {
      AdjacencyMatrix x = sample_adjacency(cfg.params, replicate_seed(cfg.seed, rep, 0));
      PipelineResult pr = run_pipeline(x, cfg.params.k, cfg.phi);
      std::vector<int> perm = align_communities(pr.est.pi_hat, cfg.params.pi);
      RankInterval ci =
          rank_ci(cfg.node, perm[static_cast<std::size_t>(cfg.community)], pr.est, pr.ctx,
                  cfg.bootstrap_draws, cfg.alpha, replicate_seed(cfg.seed, rep, 1));
      rec.lower = ci.lower;
      rec.upper = ci.upper;
      rec.covered = ci.lower <= truth_rank && truth_rank <= ci.upper;
      rec.ok = true;
    } catch (const degeneracy_error& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  });
  Aggregates agg = collect(summary.records,
                           [](const ReplicateRecord& r) { return r.covered ? 1.0 : 0.0; });
  finish_summary(summary, cfg, agg, start);
  summary.coverage = stats::mean(agg.values);
  return summary;
}

DcmmParams twonode_params(const DcmmParams& base, bool alt_hypothesis) {
  DcmmParams params = base;
  if (params.n < 4) throw validation_error("twonode experiment: need n >= 4");
  if (params.k < 2) throw validation_error("twonode experiment: need K >= 2");
  params.pi.row(0).setZero();
  params.pi(0, 0) = 1.0;
  params.pi.row(1).setZero();
  params.pi(1, alt_hypothesis ? 1 : 0) = 1.0;
  // The overrides may have displaced a community's only pure node; repair
  // deterministically on the next rows.
  for (int c = 0; c < params.k; ++c) {
    bool has_pure = false;
    for (int i = 0; i < params.n && !has_pure; ++i) has_pure = is_pure_row(params.pi, i, c);
    if (!has_pure) {
      params.pi.row(2 + c).setZero();
      params.pi(2 + c, c) = 1.0;
    }
  }
  validate(params);
  return params;
}

ExperimentSummary run_twonode_experiment(const ExperimentConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  if (cfg.replicates < 1) throw validation_error("experiment: need replicates >= 1");
  DcmmParams params = twonode_params(cfg.params, cfg.alt_hypothesis);

  ExperimentSummary summary;
  summary.kind = ExperimentKind::TwonodeCalibration;
  summary.records.resize(static_cast<std::size_t>(cfg.replicates));
  parallel_for(cfg.replicates, cfg.workers, [&](int rep) {
    ReplicateRecord& rec = summary.records[static_cast<std::size_t>(rep)];
    rec.replicate = rep;
    try {
      AdjacencyMatrix x = sample_adjacency(params, replicate_seed(cfg.seed, rep, 0));
      PipelineResult pr = run_pipeline(x, params.k, cfg.phi);
      TestReport rep2 = two_node_test(0, 1, pr.est, pr.ctx, cfg.alpha);
      rec.statistic = rep2.statistic;
      rec.p_value = rep2.p_value;
      rec.rejected = rep2.rejected;
      rec.ok = true;
    } catch (const degeneracy_error& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  });
  Aggregates agg = collect(summary.records,
                           [](const ReplicateRecord& r) { return r.rejected ? 1.0 : 0.0; });
  finish_summary(summary, cfg, agg, start);
  summary.rejection_rate = stats::mean(agg.values);
  return summary;
}

void write_stats_csv(const std::string& path, const ExperimentSummary& summary) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write '" + path + "'");
  switch (summary.kind) {
    case ExperimentKind::Normality:
      out << "replicate,statistic,status\n";
      for (const auto& rec : summary.records) {
        out << rec.replicate << ",";
        if (rec.ok) out << format_double(rec.statistic);
        out << "," << (rec.ok ? "ok" : "skipped") << "\n";
      }
      break;
    case ExperimentKind::RankCoverage:
      out << "replicate,lower,upper,true_rank,covered,status\n";
      for (const auto& rec : summary.records) {
        out << rec.replicate << ",";
        if (rec.ok)
          out << rec.lower << "," << rec.upper << "," << format_double(rec.true_rank)
              << "," << (rec.covered ? 1 : 0);
        else
          out << ",,,";
        out << "," << (rec.ok ? "ok" : "skipped") << "\n";
      }
      break;
    case ExperimentKind::TwonodeCalibration:
      out << "replicate,statistic,p_value,rejected,status\n";
      for (const auto& rec : summary.records) {
        out << rec.replicate << ",";
        if (rec.ok)
          out << format_double(rec.statistic) << "," << format_double(rec.p_value) << ","
              << (rec.rejected ? 1 : 0);
        else
          out << ",,";
        out << "," << (rec.ok ? "ok" : "skipped") << "\n";
      }
      break;
  }
}

nlohmann::json summary_to_json(const ExperimentSummary& summary,
                               const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = to_string(summary.kind);
  j["n"] = cfg.params.n;
  j["k"] = cfg.params.k;
  j["replicates"] = summary.replicates;
  j["seed"] = summary.seed;
  j["alpha"] = cfg.alpha;
  j["skipped"] = summary.skipped;
  j["ok"] = summary.ok;
  j["wall_seconds"] = summary.wall_seconds;
  j["mean"] = std::isnan(summary.mean) ? nlohmann::json() : nlohmann::json(summary.mean);
  j["std"] =
      std::isnan(summary.stddev) ? nlohmann::json() : nlohmann::json(summary.stddev);
  switch (summary.kind) {
    case ExperimentKind::Normality:
      j["ks_distance"] = summary.ks_distance;
      j["lag1_autocorr"] = summary.lag1_autocorr;
      j["node"] = cfg.node;
      j["community"] = cfg.community;
      break;
    case ExperimentKind::RankCoverage:
      j["coverage"] = summary.coverage;
      j["bootstrap"] = cfg.bootstrap_draws;
      j["node"] = cfg.node;
      j["community"] = cfg.community;
      break;
    case ExperimentKind::TwonodeCalibration:
      j["rejection_rate"] = summary.rejection_rate;
      j["hypothesis"] = cfg.alt_hypothesis ? "alt" : "null";
      break;
  }
  return j;
}

}  // namespace dcmm
