#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "meso/errors.hpp"
#include "meso/graph.hpp"
#include "meso/inference.hpp"
#include "meso/model.hpp"
#include "meso/random.hpp"
#include "meso/sampler.hpp"

namespace meso {

struct GeneratorSpec {
  std::size_t n1 = 40;
  std::size_t n2 = 60;
  BlockProbs p{0.20, 0.10, 0.10};
  std::uint64_t seed = 1;
  bool allow_empty_block = false;

  std::size_t n() const noexcept { return n1 + n2; }

  void validate() const {
    for (double v : {p.p11, p.p12, p.p22})
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("edge probabilities must lie in [0, 1]");
    if (!allow_empty_block && (n1 == 0 || n2 == 0)) throw ConfigError("both blocks must be non-empty");
  }
};

/// Block sizes for a group-1 fraction of n nodes, rounding to nearest.
inline std::pair<std::size_t, std::size_t> sizes_from_fraction(std::size_t n, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ConfigError("block fraction must lie in [0, 1]");
  const auto n1 = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return {n1, n - n1};
}

struct SyntheticGraph {
  Graph graph;
  LabelVector truth;
};

/// Two-block SBM draw. Nodes 0..n1-1 form block 1 and are named by their id.
inline SyntheticGraph generate_sbm(const GeneratorSpec& spec) {
  spec.validate();
  const auto n = spec.n();
  auto rng = make_rng(spec.seed, {0x67656eULL});
  LabelVector truth(n, 2);
  std::fill_n(truth.begin(), spec.n1, std::uint8_t{1});

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const int pair = truth[i] + truth[j] - 2;
      const double p = pair == 0 ? spec.p.p11 : pair == 1 ? spec.p.p12 : spec.p.p22;
      if (sample_uniform(rng) < p) edges.emplace_back(i, j);
    }
  }
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = std::to_string(i);
  return {Graph::from_edges(std::move(names), edges), std::move(truth)};
}

/// Fraction of nodes whose posterior-majority group matches the truth,
/// maximized over the global exchange of group names.
inline double label_recovery(const std::vector<double>& prob_group1, const LabelVector& truth) {
  if (truth.empty()) return 1.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) agree += (prob_group1[i] >= 0.5) == (truth[i] == 1);
  const auto frac = static_cast<double>(agree) / static_cast<double>(truth.size());
  return std::max(frac, 1.0 - frac);
}

/// p12 in {0.05, 0.075, ..., 0.25}.
inline std::vector<double> default_p12_grid() {
  std::vector<double> grid;
  for (int k = 2; k <= 10; ++k) grid.push_back(0.025 * k);
  return grid;
}

struct SweepSpec {
  std::size_t n = 100;
  double fraction = 0.4;
  double p11 = 0.20;
  double p22 = 0.10;
  std::vector<double> p12_grid = default_p12_grid();
  std::int64_t replicates = 100;
  ChainConfig chain{.total_samples = 1500, .burn_in = 500};
  double a0 = 1.0;
  double b0 = 1.0;
  double pi = 0.5;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const {
    if (p12_grid.empty()) throw ConfigError("p12 grid is empty");
    for (double v : p12_grid)
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("p12 grid values must lie in [0, 1]");
    if (replicates < 1) throw ConfigError("replicates must be at least 1");
    if (n < 2) throw ConfigError("sweep graphs need at least 2 nodes");
    chain.validate();
    GeneratorSpec{sizes_from_fraction(n, fraction).first, sizes_from_fraction(n, fraction).second, {p11, 0.0, p22}}
        .validate();
  }
};

struct ReplicateResult {
  std::size_t grid_index = 0;
  double p12 = 0.0;
  std::int64_t replicate = 0;
  std::size_t edges = 0;
  StructureVerdict verdict;
  double label_recovery = 0.0;
};

struct SweepRow {
  double p12 = 0.0;
  double mean_assortative = 0.0, se_assortative = 0.0;
  double mean_cp = 0.0, se_cp = 0.0;
  double mean_disassortative = 0.0, se_disassortative = 0.0;
  std::int64_t replicates = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;             // grid order
  std::vector<ReplicateResult> replicates;  // grid-major, then replicate order
};

/// Generates and fits one replicate. Its generator and chain streams depend
/// only on (seed, grid_index, replicate).
inline ReplicateResult run_replicate(const SweepSpec& spec, std::size_t grid_index, std::int64_t replicate) {
  auto rng = make_rng(spec.seed, {0x7377656570ULL, grid_index, static_cast<std::uint64_t>(replicate)});
  const auto [n1, n2] = sizes_from_fraction(spec.n, spec.fraction);
  GeneratorSpec gen{n1, n2, {spec.p11, spec.p12_grid[grid_index], spec.p22}, rng()};
  auto synthetic = generate_sbm(gen);

  ChainConfig cfg = spec.chain;
  cfg.seed = rng();
  cfg.threads = 1;
  auto h = Hyperparameters::uniform(synthetic.graph.n(), spec.a0, spec.b0, spec.pi);
  auto samples = run_chain(synthetic.graph, h, cfg);

  ReplicateResult r;
  r.grid_index = grid_index;
  r.p12 = spec.p12_grid[grid_index];
  r.replicate = replicate;
  r.edges = synthetic.graph.m();
  r.verdict = classify_structure(samples);
  r.label_recovery = label_recovery(membership_probabilities(samples), synthetic.truth);
  return r;
}

namespace detail {

inline std::pair<double, double> mean_and_se(const std::vector<double>& x) {
  const auto k = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= k;
  if (x.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (k - 1.0) / k)};
}

}  // namespace detail

/// Simulation sweep over p12: per grid value, the mean and standard error
/// of each structure probability across replicate graphs.
inline SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto reps = static_cast<std::size_t>(spec.replicates);
  const auto tasks = spec.p12_grid.size() * reps;

  SweepResult result;
  result.replicates.resize(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks;) {
      try {
        result.replicates[t] = run_replicate(spec, t / reps, static_cast<std::int64_t>(t % reps));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(tasks)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t gi = 0; gi < spec.p12_grid.size(); ++gi) {
    std::vector<double> a, cp, d;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& v = result.replicates[gi * reps + r].verdict;
      a.push_back(v.p_assortative);
      cp.push_back(v.p_core_periphery);
      d.push_back(v.p_disassortative);
    }
    SweepRow row;
    row.p12 = spec.p12_grid[gi];
    std::tie(row.mean_assortative, row.se_assortative) = detail::mean_and_se(a);
    std::tie(row.mean_cp, row.se_cp) = detail::mean_and_se(cp);
    std::tie(row.mean_disassortative, row.se_disassortative) = detail::mean_and_se(d);
    row.replicates = spec.replicates;
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace meso
