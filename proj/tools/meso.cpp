// meso: posterior probabilities of assortative, disassortative and
// core-periphery structure under a two-block stochastic block model.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "meso/cli.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw meso::DataError("cannot write '" + path + "'");
  out << text;
}

void add_input_options(CLI::App* cmd, meso::cli::InputOptions& in, std::string& path, std::string& dataset,
                       std::string& nodes) {
  cmd->add_option("path", path, "Edge-list file (two node names per line, '#' comments)");
  cmd->add_option("--dataset", dataset, "Bundled dataset")->check(CLI::IsMember({"karate", "dolphins"}));
  cmd->add_option("--nodes", nodes, "Node-list sidecar (adds isolated nodes with --allow-isolated)");
  cmd->add_flag("--allow-isolated", in.allow_isolated, "Accept nodes from --nodes that have no edges");
}

void finish_input(meso::cli::InputOptions& in, const std::string& path, const std::string& dataset,
                  const std::string& nodes) {
  if (!path.empty()) in.path = path;
  if (!dataset.empty()) in.dataset = dataset;
  if (!nodes.empty()) in.nodes_file = nodes;
}

void add_prior_options(CLI::App* cmd, meso::cli::PriorOptions& prior) {
  cmd->add_option("--a0", prior.a0, "Beta prior shape a for every block")->capture_default_str();
  cmd->add_option("--b0", prior.b0, "Beta prior shape b for every block")->capture_default_str();
  cmd->add_option("--a0-11", prior.a0_11, "Override a for block (1,1)");
  cmd->add_option("--b0-11", prior.b0_11, "Override b for block (1,1)");
  cmd->add_option("--a0-12", prior.a0_12, "Override a for block (1,2)");
  cmd->add_option("--b0-12", prior.b0_12, "Override b for block (1,2)");
  cmd->add_option("--a0-22", prior.a0_22, "Override a for block (2,2)");
  cmd->add_option("--b0-22", prior.b0_22, "Override b for block (2,2)");
  cmd->add_option("--pi", prior.pi, "Prior probability of group 1 for every node")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian two-block SBM: posterior probabilities of meso-scale structure"};
  app.require_subcommand(1);

  // analyze
  meso::cli::AnalyzeOptions analyze;
  std::string a_path, a_dataset, a_nodes, a_out, a_format = "json", a_traces, a_densities, a_init = "random";
  auto* cmd_analyze = app.add_subcommand("analyze", "Run the sampler on a graph and report structure probabilities");
  add_input_options(cmd_analyze, analyze.input, a_path, a_dataset, a_nodes);
  add_prior_options(cmd_analyze, analyze.prior);
  cmd_analyze->add_option("--samples", analyze.chain.total_samples, "Total MCMC iterations per chain")
      ->capture_default_str();
  cmd_analyze->add_option("--burn-in", analyze.chain.burn_in, "Iterations discarded per chain")->capture_default_str();
  cmd_analyze->add_option("--thin", analyze.chain.thin, "Keep every k-th post burn-in iteration")
      ->capture_default_str();
  cmd_analyze->add_option("--chains", analyze.chain.chains, "Independent chains")->capture_default_str();
  cmd_analyze->add_option("--threads", analyze.chain.threads, "Worker threads for chains")->capture_default_str();
  cmd_analyze->add_option("--seed", analyze.chain.seed, "RNG seed")->capture_default_str();
  cmd_analyze->add_option("--init", a_init, "Initial labels")->check(CLI::IsMember({"random", "degree"}))
      ->capture_default_str();
  cmd_analyze->add_flag("--coassign", analyze.chain.coassign, "Tally pairwise co-assignment (O(n^2) memory)");
  cmd_analyze->add_flag("--store-labels", analyze.chain.store_labels, "Keep every retained label vector");
  cmd_analyze->add_option("--bins", analyze.bins, "Histogram bins for density summaries")->capture_default_str();
  cmd_analyze->add_option("--out", a_out, "Report file (default stdout)");
  cmd_analyze->add_option("--format", a_format, "Report format")->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd_analyze->add_option("--emit-traces", a_traces, "Write per-draw (p11,p12,p22) traces as CSV");
  cmd_analyze->add_option("--emit-densities", a_densities, "Write posterior histograms as CSV");
  cmd_analyze->add_flag("--timing", analyze.timing, "Include wall-clock duration in the report");

  // generate
  meso::cli::GenerateOptions generate;
  std::string g_out = "-", g_labels;
  auto* cmd_generate = app.add_subcommand("generate", "Draw a two-block SBM graph");
  cmd_generate->add_option("--n", generate.n, "Node count")->capture_default_str();
  cmd_generate->add_option("--frac", generate.fraction, "Fraction of nodes in block 1 (default 0.4)");
  cmd_generate->add_option("--n1", generate.n1, "Block 1 size");
  cmd_generate->add_option("--n2", generate.n2, "Block 2 size");
  cmd_generate->add_option("--p11", generate.p.p11, "Edge probability within block 1")->capture_default_str();
  cmd_generate->add_option("--p12", generate.p.p12, "Edge probability between blocks")->capture_default_str();
  cmd_generate->add_option("--p22", generate.p.p22, "Edge probability within block 2")->capture_default_str();
  cmd_generate->add_option("--seed", generate.seed, "RNG seed")->capture_default_str();
  cmd_generate->add_option("--out", g_out, "Edge-list file (default stdout)");
  cmd_generate->add_option("--labels", g_labels, "Ground-truth 'node label' file");

  // simulate
  meso::SweepSpec sweep;
  std::string s_grid, s_out, s_raw;
  auto* cmd_simulate = app.add_subcommand("simulate", "Run the p12 simulation sweep and write the summary table");
  cmd_simulate->add_option("--n", sweep.n, "Nodes per graph")->capture_default_str();
  cmd_simulate->add_option("--frac", sweep.fraction, "Fraction of nodes in block 1")->capture_default_str();
  cmd_simulate->add_option("--p11", sweep.p11, "Edge probability within block 1")->capture_default_str();
  cmd_simulate->add_option("--p22", sweep.p22, "Edge probability within block 2")->capture_default_str();
  cmd_simulate->add_option("--grid", s_grid, "p12 values: start:stop:step or a,b,c (default 0.05:0.25:0.025)");
  cmd_simulate->add_option("--replicates", sweep.replicates, "Graphs per grid value")->capture_default_str();
  cmd_simulate->add_option("--samples", sweep.chain.total_samples, "MCMC iterations per fit")->capture_default_str();
  cmd_simulate->add_option("--burn-in", sweep.chain.burn_in, "Burn-in per fit")->capture_default_str();
  cmd_simulate->add_option("--thin", sweep.chain.thin, "Thinning per fit")->capture_default_str();
  cmd_simulate->add_option("--a0", sweep.a0, "Beta prior shape a")->capture_default_str();
  cmd_simulate->add_option("--b0", sweep.b0, "Beta prior shape b")->capture_default_str();
  cmd_simulate->add_option("--pi", sweep.pi, "Label prior")->capture_default_str();
  cmd_simulate->add_option("--seed", sweep.seed, "RNG seed")->capture_default_str();
  cmd_simulate->add_option("--threads", sweep.threads, "Worker threads")->capture_default_str();
  cmd_simulate->add_option("--out", s_out, "Sweep CSV (default stdout)");
  cmd_simulate->add_option("--raw", s_raw, "Per-replicate CSV");

  // oracle
  meso::cli::OracleOptions oracle;
  std::string o_path, o_dataset, o_nodes, o_out;
  auto* cmd_oracle = app.add_subcommand("oracle", "Exact structure probabilities by enumeration (n <= 14)");
  add_input_options(cmd_oracle, oracle.input, o_path, o_dataset, o_nodes);
  add_prior_options(cmd_oracle, oracle.prior);
  cmd_oracle->add_option("--points", oracle.points, "Simpson quadrature points (odd)")->capture_default_str();
  cmd_oracle->add_option("--out", o_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*cmd_analyze) {
      finish_input(analyze.input, a_path, a_dataset, a_nodes);
      analyze.chain.init = a_init == "degree" ? meso::InitStrategy::degree_split : meso::InitStrategy::random_labels;
      auto result = meso::cli::cmd_analyze(analyze);
      for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << '\n';
      if (a_format == "csv")
        write_output(meso::report_to_csv(result.report), a_out);
      else
        write_output(meso::report_to_json(result.report).dump(2) + "\n", a_out);
      if (!a_traces.empty()) write_output(meso::traces_to_csv(result.samples), a_traces);
      if (!a_densities.empty()) write_output(meso::densities_to_csv(result.report.density), a_densities);
    } else if (*cmd_generate) {
      auto synthetic = meso::generate_sbm(meso::cli::generator_spec(generate));
      write_output(meso::to_edge_list(synthetic.graph), g_out);
      if (!g_labels.empty()) write_output(meso::cli::labels_to_text(synthetic), g_labels);
    } else if (*cmd_simulate) {
      if (!s_grid.empty()) sweep.p12_grid = meso::cli::parse_grid(s_grid);
      auto result = meso::run_sweep(sweep);
      write_output(meso::sweep_to_csv(result), s_out);
      if (!s_raw.empty()) write_output(meso::replicates_to_csv(result), s_raw);
    } else if (*cmd_oracle) {
      finish_input(oracle.input, o_path, o_dataset, o_nodes);
      write_output(meso::cli::cmd_oracle(oracle).dump(2) + "\n", o_out);
    }
  } catch (const meso::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const meso::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const meso::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
