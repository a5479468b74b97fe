#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>

#include "dcmm/errors.hpp"
#include "dcmm/harness.hpp"
#include "dcmm/inference.hpp"
#include "dcmm/io.hpp"
#include "dcmm/pipeline.hpp"

namespace fs = std::filesystem;
using namespace dcmm;

namespace {

double parse_phi(const std::string& s) {
  if (s == "auto") return -1.0;
  try {
    double v = std::stod(s);
    if (!(v > 0.0)) throw validation_error("--phi must be positive or 'auto'");
    return v;
  } catch (const validation_error&) {
    throw;
  } catch (const std::exception&) {
    throw validation_error("--phi must be a positive number or 'auto'");
  }
}

struct AdjacencyArgs {
  std::string path;
  std::string format = "edgelist";
};

AdjacencyMatrix load_from(const AdjacencyArgs& args) {
  return load_adjacency(args.path, adjacency_format_from_string(args.format));
}

int run(int argc, char** argv) {
  CLI::App app{"Estimation and inference for degree-corrected mixed-membership networks"};
  app.require_subcommand(1);

  // gen-config
  auto* gen = app.add_subcommand("gen-config", "Write a synthetic model configuration");
  std::string gen_setting = "const09";
  int gen_n = 600;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  bool gen_paper_scale = false;
  gen->add_option("--setting", gen_setting, "const06 | uniform | const09");
  gen->add_option("--n", gen_n, "node count (default 600)");
  gen->add_option("--seed", gen_seed, "configuration seed");
  gen->add_option("--out", gen_out, "output cfg.json")->required();
  gen->add_flag("--paper-scale", gen_paper_scale, "use n=2000");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a batch experiment");
  std::string sim_config;
  std::string sim_experiment = "normality";
  int sim_replicates = 300;
  std::uint64_t sim_seed = 1;
  int sim_workers = 1;
  std::string sim_out;
  double sim_alpha = 0.05;
  int sim_bootstrap = 1000;
  int sim_node = 0;
  int sim_community = 0;
  std::string sim_hypothesis = "null";
  std::string sim_phi = "auto";
  bool sim_paper_scale = false;
  sim->add_option("--config", sim_config, "cfg.json from gen-config")->required();
  sim->add_option("--experiment", sim_experiment,
                  "normality | rank_coverage | twonode_calibration");
  sim->add_option("--replicates", sim_replicates, "replicate count (default 300)");
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--workers", sim_workers, "worker thread count");
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("--alpha", sim_alpha, "significance level");
  sim->add_option("--bootstrap", sim_bootstrap, "bootstrap draws (rank_coverage)");
  sim->add_option("--node", sim_node, "designated node, zero-based");
  sim->add_option("--community", sim_community, "designated community, zero-based");
  sim->add_option("--hypothesis", sim_hypothesis, "null | alt (twonode_calibration)");
  sim->add_option("--phi", sim_phi, "vertex-hunting radius or 'auto'");
  sim->add_flag("--paper-scale", sim_paper_scale, "use 500 replicates");

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate memberships on a network");
  AdjacencyArgs est_adj;
  int est_k = 2;
  std::string est_phi = "auto";
  std::string est_out;
  bool est_clip = false;
  est->add_option("--adjacency", est_adj.path, "adjacency file")->required();
  est->add_option("--format", est_adj.format, "edgelist | dense");
  est->add_option("--k", est_k, "community count")->required();
  est->add_option("--phi", est_phi, "vertex-hunting radius or 'auto'");
  est->add_option("--out", est_out, "output directory")->required();
  est->add_flag("--clip", est_clip, "clip negative memberships and renormalize");

  // rank-ci
  auto* rci = app.add_subcommand("rank-ci", "Bootstrap rank confidence interval");
  AdjacencyArgs rci_adj;
  int rci_k = 2;
  int rci_node = 0;
  int rci_community = 0;
  double rci_alpha = 0.05;
  int rci_bootstrap = 1000;
  std::uint64_t rci_seed = 1;
  std::string rci_phi = "auto";
  std::string rci_out;
  rci->add_option("--adjacency", rci_adj.path, "adjacency file")->required();
  rci->add_option("--format", rci_adj.format, "edgelist | dense");
  rci->add_option("--k", rci_k, "community count")->required();
  rci->add_option("--node", rci_node, "node, zero-based")->required();
  rci->add_option("--community", rci_community, "community, zero-based")->required();
  rci->add_option("--alpha", rci_alpha, "significance level");
  rci->add_option("--bootstrap", rci_bootstrap, "bootstrap draws");
  rci->add_option("--seed", rci_seed, "bootstrap seed");
  rci->add_option("--phi", rci_phi, "vertex-hunting radius or 'auto'");
  rci->add_option("--out", rci_out, "output report.json")->required();

  // test-closest
  auto* tcl = app.add_subcommand("test-closest", "Closest-community test");
  AdjacencyArgs tcl_adj;
  int tcl_k = 2;
  int tcl_node = 0;
  double tcl_alpha = 0.05;
  std::string tcl_phi = "auto";
  std::string tcl_out;
  tcl->add_option("--adjacency", tcl_adj.path, "adjacency file")->required();
  tcl->add_option("--format", tcl_adj.format, "edgelist | dense");
  tcl->add_option("--k", tcl_k, "community count")->required();
  tcl->add_option("--node", tcl_node, "node, zero-based")->required();
  tcl->add_option("--alpha", tcl_alpha, "significance level");
  tcl->add_option("--phi", tcl_phi, "vertex-hunting radius or 'auto'");
  tcl->add_option("--out", tcl_out, "output report.json")->required();

  // test-pair
  auto* tpr = app.add_subcommand("test-pair", "Two-node membership test");
  AdjacencyArgs tpr_adj;
  int tpr_k = 2;
  std::string tpr_nodes;
  double tpr_alpha = 0.05;
  std::string tpr_phi = "auto";
  std::string tpr_out;
  tpr->add_option("--adjacency", tpr_adj.path, "adjacency file")->required();
  tpr->add_option("--format", tpr_adj.format, "edgelist | dense");
  tpr->add_option("--k", tpr_k, "community count")->required();
  tpr->add_option("--nodes", tpr_nodes, "pair 'I,J', zero-based")->required();
  tpr->add_option("--alpha", tpr_alpha, "significance level");
  tpr->add_option("--phi", tpr_phi, "vertex-hunting radius or 'auto'");
  tpr->add_option("--out", tpr_out, "output report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // flag/usage problems are validation errors
  }

  if (gen->parsed()) {
    if (gen_paper_scale) gen_n = 2000;
    DcmmParams params =
        synthetic_config(theta_setting_from_string(gen_setting), gen_n, gen_seed);
    save_params(gen_out, params);
    std::printf("wrote %s (n=%d, k=%d, setting=%s)\n", gen_out.c_str(), params.n,
                params.k, gen_setting.c_str());
    return 0;
  }

  if (sim->parsed()) {
    ExperimentConfig cfg;
    cfg.kind = experiment_kind_from_string(sim_experiment);
    cfg.params = load_params(sim_config);
    cfg.replicates = sim_paper_scale ? 500 : sim_replicates;
    cfg.seed = sim_seed;
    cfg.workers = sim_workers;
    cfg.alpha = sim_alpha;
    cfg.bootstrap_draws = sim_bootstrap;
    cfg.node = sim_node;
    cfg.community = sim_community;
    cfg.phi = parse_phi(sim_phi);
    if (sim_hypothesis == "alt")
      cfg.alt_hypothesis = true;
    else if (sim_hypothesis != "null")
      throw validation_error("--hypothesis must be null or alt");

    ExperimentSummary summary;
    switch (cfg.kind) {
      case ExperimentKind::Normality: summary = run_normality_experiment(cfg); break;
      case ExperimentKind::RankCoverage: summary = run_rank_coverage_experiment(cfg); break;
      case ExperimentKind::TwonodeCalibration: summary = run_twonode_experiment(cfg); break;
    }
    fs::create_directories(sim_out);
    write_stats_csv((fs::path(sim_out) / "stats.csv").string(), summary);
    save_report((fs::path(sim_out) / "summary.json").string(),
                summary_to_json(summary, cfg));
    std::printf("%s: %d replicates, %d skipped, %.1fs\n",
                to_string(summary.kind).c_str(), summary.replicates, summary.skipped,
                summary.wall_seconds);
    if (!summary.ok) {
      std::fprintf(stderr, "error: more than 5%% of replicates degenerated\n");
      return 3;
    }
    return 0;
  }

  if (est->parsed()) {
    AdjacencyMatrix adj = load_from(est_adj);
    PipelineResult pr = run_pipeline(adj, est_k, parse_phi(est_phi));
    fs::create_directories(est_out);
    Matrix pi = est_clip ? clipped_pi(pr.est) : pr.est.pi_hat;
    write_pi_csv((fs::path(est_out) / "pi.csv").string(), pi);
    write_embedding_csv((fs::path(est_out) / "embedding.csv").string(), pr.emb.points);
    save_report((fs::path(est_out) / "vertices.json").string(),
                vertices_to_json(pr.hunt));
    std::printf("estimated %d nodes, %d communities (phi=%s)\n", adj.n, est_k,
                format_double(pr.hunt.radius).c_str());
    return 0;
  }

  if (rci->parsed()) {
    AdjacencyMatrix adj = load_from(rci_adj);
    PipelineResult pr = run_pipeline(adj, rci_k, parse_phi(rci_phi));
    RankInterval ci = rank_ci(rci_node, rci_community, pr.est, pr.ctx, rci_bootstrap,
                              rci_alpha, rci_seed);
    save_report(rci_out, rank_interval_to_json(ci));
    std::printf("rank CI for node %d, community %d: [%d, %d]\n", ci.node, ci.community,
                ci.lower, ci.upper);
    return 0;
  }

  if (tcl->parsed()) {
    AdjacencyMatrix adj = load_from(tcl_adj);
    PipelineResult pr = run_pipeline(adj, tcl_k, parse_phi(tcl_phi));
    TestReport rep = closest_community_test(tcl_node, pr.est, pr.ctx, tcl_alpha);
    save_report(tcl_out, test_report_to_json(rep));
    if (rep.rejected_community)
      std::printf("node %d closest to community %d (p=%s)\n", tcl_node,
                  *rep.rejected_community, format_double(rep.p_value).c_str());
    else
      std::printf("no community rejected for node %d (p=%s)\n", tcl_node,
                  format_double(rep.p_value).c_str());
    return 0;
  }

  if (tpr->parsed()) {
    auto comma = tpr_nodes.find(',');
    if (comma == std::string::npos)
      throw validation_error("--nodes must be of the form I,J");
    int ni = 0, nj = 0;
    try {
      ni = std::stoi(tpr_nodes.substr(0, comma));
      nj = std::stoi(tpr_nodes.substr(comma + 1));
    } catch (const std::exception&) {
      throw validation_error("--nodes must be of the form I,J");
    }
    AdjacencyMatrix adj = load_from(tpr_adj);
    PipelineResult pr = run_pipeline(adj, tpr_k, parse_phi(tpr_phi));
    TestReport rep = two_node_test(ni, nj, pr.est, pr.ctx, tpr_alpha);
    save_report(tpr_out, test_report_to_json(rep));
    std::printf("two-node test (%d,%d): statistic=%s p=%s %s\n", ni, nj,
                format_double(rep.statistic).c_str(), format_double(rep.p_value).c_str(),
                rep.rejected ? "rejected" : "not rejected");
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const degeneracy_error& e) {
    std::fprintf(stderr, "numerical degeneracy: %s\n", e.what());
    return 3;
  } catch (const validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
}
