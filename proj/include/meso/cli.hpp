#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "meso/datasets.hpp"
#include "meso/errors.hpp"
#include "meso/graph.hpp"
#include "meso/inference.hpp"
#include "meso/model.hpp"
#include "meso/report.hpp"
#include "meso/sampler.hpp"
#include "meso/synth.hpp"

namespace meso::cli {

/// Graph source shared by `analyze` and `oracle`.
struct InputOptions {
  std::optional<std::string> path;
  std::optional<std::string> dataset;
  std::optional<std::string> nodes_file;
  bool allow_isolated = false;
};

struct LoadedGraph {
  Graph graph;
  InputInfo info;
};

inline LoadedGraph load_input(const InputOptions& in) {
  if (in.path.has_value() == in.dataset.has_value())
    throw ConfigError("give exactly one of an edge-list path or --dataset");
  if (in.dataset) {
    if (in.nodes_file) throw ConfigError("--nodes cannot be combined with --dataset");
    Graph g = load_dataset(*in.dataset);
    auto info = describe_input(g, "dataset:" + *in.dataset);
    return {std::move(g), std::move(info)};
  }
  ParseOptions opts;
  opts.allow_isolated = in.allow_isolated;
  if (in.nodes_file) opts.node_list = parse_node_list(read_text_file(*in.nodes_file));
  ParseDiagnostics diag;
  Graph g = parse_edge_list(read_text_file(*in.path), opts, &diag);
  auto info = describe_input(g, *in.path, diag);
  return {std::move(g), std::move(info)};
}

/// Beta hyperparameters: a global (a0, b0) with optional per-block overrides.
struct PriorOptions {
  double a0 = 1.0;
  double b0 = 1.0;
  std::optional<double> a0_11, b0_11, a0_12, b0_12, a0_22, b0_22;
  double pi = 0.5;

  Hyperparameters build(std::size_t n) const {
    Hyperparameters h;
    h.block11 = {a0_11.value_or(a0), b0_11.value_or(b0)};
    h.block12 = {a0_12.value_or(a0), b0_12.value_or(b0)};
    h.block22 = {a0_22.value_or(a0), b0_22.value_or(b0)};
    h.pi.assign(n, pi);
    h.validate();
    return h;
  }
};

struct AnalyzeOptions {
  InputOptions input;
  PriorOptions prior;
  ChainConfig chain;
  std::size_t bins = 50;
  bool timing = false;
};

struct AnalyzeResult {
  AnalysisReport report;
  PosteriorSamples samples;
};

inline AnalyzeResult cmd_analyze(const AnalyzeOptions& opts) {
  opts.chain.validate();
  if (opts.bins < 2) throw ConfigError("--bins must be at least 2");
  auto [g, info] = load_input(opts.input);
  const auto h = opts.prior.build(g.n());

  const auto start = std::chrono::steady_clock::now();
  auto samples = run_chain(g, h, opts.chain);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  auto report = build_report(g, std::move(info), h, opts.chain, samples, opts.bins);
  if (opts.timing) report.wall_seconds = elapsed.count();
  return {std::move(report), std::move(samples)};
}

struct GenerateOptions {
  std::size_t n = 100;
  std::optional<double> fraction;
  std::optional<std::size_t> n1;
  std::optional<std::size_t> n2;
  BlockProbs p{0.20, 0.10, 0.10};
  std::uint64_t seed = 1;
};

inline GeneratorSpec generator_spec(const GenerateOptions& opts) {
  GeneratorSpec spec;
  if (opts.n1 || opts.n2) {
    if (opts.fraction) throw ConfigError("give either --frac or --n1/--n2, not both");
    if (!opts.n1 || !opts.n2) throw ConfigError("--n1 and --n2 must be given together");
    if (*opts.n1 + *opts.n2 != opts.n)
      throw ConfigError("block sizes " + std::to_string(*opts.n1) + " + " + std::to_string(*opts.n2) +
                        " do not sum to n=" + std::to_string(opts.n));
    spec.n1 = *opts.n1;
    spec.n2 = *opts.n2;
  } else {
    std::tie(spec.n1, spec.n2) = sizes_from_fraction(opts.n, opts.fraction.value_or(0.4));
  }
  spec.p = opts.p;
  spec.seed = opts.seed;
  spec.validate();
  return spec;
}

/// Two-column "node label" text for a generated graph's ground truth.
inline std::string labels_to_text(const SyntheticGraph& s) {
  std::string out;
  for (std::size_t i = 0; i < s.truth.size(); ++i)
    out += s.graph.name(static_cast<NodeId>(i)) + ' ' + std::to_string(int(s.truth[i])) + '\n';
  return out;
}

/// Accepts "start:stop:step" or a comma-separated list.
inline std::vector<double> parse_grid(const std::string& text) {
  const auto number = [&](const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ConfigError("invalid grid value '" + tok + "'");
    }
    if (used != tok.size() || !std::isfinite(v)) throw ConfigError("invalid grid value '" + tok + "'");
    return v;
  };
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw ConfigError("grid range must be start:stop:step");
    const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw ConfigError("grid range needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= count; ++k) grid.push_back(start + static_cast<double>(k) * step);
  } else {
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');) grid.push_back(number(tok));
  }
  if (grid.empty()) throw ConfigError("grid is empty");
  for (double v : grid)
    if (v < 0.0 || v > 1.0) throw ConfigError("grid values must lie in [0, 1]");
  return grid;
}

struct OracleOptions {
  InputOptions input;
  PriorOptions prior;
  std::size_t points = 4097;
};

inline nlohmann::ordered_json cmd_oracle(const OracleOptions& opts) {
  auto [g, info] = load_input(opts.input);
  if (g.n() > exact_max_nodes)
    throw ConfigError("oracle supports at most " + std::to_string(exact_max_nodes) + " nodes; input has " +
                      std::to_string(g.n()));
  const auto h = opts.prior.build(g.n());
  const auto exact = exact_structure_details(g, h, opts.points);

  nlohmann::ordered_json j;
  j["schema_version"] = report_schema_version;
  j["input"] = {{"source", info.source}, {"n", info.n}, {"m", info.m}, {"edge_list_sha256", info.edge_list_sha256}};
  j["config"] = {{"quadrature_points", opts.points}, {"hyperparameters", detail::hyper_json(h)}};
  j["verdict"] = verdict_to_json(exact.verdict);
  j["diagnostics"] = {{"label_vectors", exact.label_vectors},
                      {"distinct_counts", exact.distinct_counts},
                      {"core_periphery_integrated", exact.core_periphery_integrated},
                      {"max_quadrature_error", exact.max_quadrature_error}};
  return j;
}

}  // namespace meso::cli
