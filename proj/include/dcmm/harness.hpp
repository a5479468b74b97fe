#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcmm/model.hpp"

namespace dcmm {

enum class ExperimentKind { Normality, RankCoverage, TwonodeCalibration };

ExperimentKind experiment_kind_from_string(const std::string& s);
std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Normality;
  DcmmParams params;
  int replicates = 300;
  int bootstrap_draws = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  int workers = 1;
  int node = 0;       // designated node (zero-based)
  int community = 0;  // designated community (zero-based)
  bool alt_hypothesis = false;  // two-node experiment: alternative instead of null
  double phi = -1.0;            // <= 0 selects default_radius
};

struct ReplicateRecord {
  int replicate = 0;
  bool ok = false;
  double statistic = 0.0;  // standardized stat / test statistic
  double p_value = 0.0;
  int lower = 0;
  int upper = 0;
  double true_rank = 0.0;
  bool covered = false;
  bool rejected = false;
  std::string error;
};

struct ExperimentSummary {
  ExperimentKind kind = ExperimentKind::Normality;
  std::vector<ReplicateRecord> records;  // one per configured replicate
  int replicates = 0;
  int skipped = 0;
  bool ok = true;  // false when skips exceed the 5% budget
  double mean = 0.0;
  double stddev = 0.0;  // NaN with fewer than 2 values
  double ks_distance = 0.0;
  double lag1_autocorr = 0.0;
  double coverage = 0.0;
  double rejection_rate = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

// Per replicate: sample the network, run the full pipeline, align labels to
// the truth, record the standardized statistic for the designated
// (node, community). Deterministic in (config, seed) for any worker count.
ExperimentSummary run_normality_experiment(const ExperimentConfig& cfg);

// Per replicate: rank CI for the designated pair vs the true rank (ties get
// the mean of their occupied positions).
ExperimentSummary run_rank_coverage_experiment(const ExperimentConfig& cfg);

// Per replicate: the two-node test on two designated pure nodes, same
// community under the null, different communities under the alternative.
ExperimentSummary run_twonode_experiment(const ExperimentConfig& cfg);

// The params actually used by the two-node experiment (rows 0 and 1 forced
// pure, pure-node repair applied); exposed for tests.
DcmmParams twonode_params(const DcmmParams& base, bool alt_hypothesis);

// Descending rank of column entry (i,k) with tied values averaged.
double true_rank_of(const Matrix& pi, int node, int community);

void write_stats_csv(const std::string& path, const ExperimentSummary& summary);
nlohmann::json summary_to_json(const ExperimentSummary& summary,
                               const ExperimentConfig& cfg);

}  // namespace dcmm
