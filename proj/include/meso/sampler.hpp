#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "meso/errors.hpp"
#include "meso/graph.hpp"
#include "meso/model.hpp"
#include "meso/random.hpp"

namespace meso {

enum class InitStrategy { random_labels, degree_split };

struct ChainConfig {
  std::int64_t total_samples = 15000;
  std::int64_t burn_in = 5000;
  std::int64_t thin = 1;
  std::uint64_t seed = 1;
  InitStrategy init = InitStrategy::random_labels;
  std::int64_t chains = 1;
  bool coassign = false;      // O(n^2) pair tallies
  bool store_labels = false;  // full label vector per retained draw
  unsigned threads = 1;       // workers for independent chains

  void validate() const {
    if (total_samples <= 0) throw ConfigError("total samples must be positive");
    if (burn_in < 0) throw ConfigError("burn-in must be non-negative");
    if (burn_in >= total_samples)
      throw ConfigError("burn-in (" + std::to_string(burn_in) + ") must be smaller than total samples (" +
                        std::to_string(total_samples) + ")");
    if (thin < 1) throw ConfigError("thin must be at least 1");
    if (chains < 1) throw ConfigError("chains must be at least 1");
  }

  std::int64_t retained_per_chain() const noexcept { return (total_samples - burn_in) / thin; }
};

struct ChainState {
  LabelVector c;
  BlockProbs p;
  BlockCounts counts;
  double log_lik = 0.0;
};

/// Retained output of one chain, or of several chains pooled in chain order.
struct PosteriorSamples {
  std::size_t n = 0;
  std::int64_t retained = 0;
  std::vector<BlockProbs> draws;
  std::vector<double> log_lik;
  std::vector<std::uint64_t> label_tally;  // draws with c_i = 1
  std::vector<std::uint64_t> size_tally;   // histogram over n1 in 0..n
  bool coassign_enabled = false;
  std::vector<std::uint64_t> coassign_tally;  // row-major n x n, draws with c_i = c_j
  bool labels_stored = false;
  std::vector<LabelVector> label_draws;
  std::uint64_t swaps_accepted = 0;  // post burn-in
  std::uint64_t swaps_proposed = 0;
  std::vector<PosteriorSamples> chains;  // per-chain results when pooled from several

  double swap_acceptance_rate() const noexcept {
    return swaps_proposed == 0 ? 0.0 : static_cast<double>(swaps_accepted) / static_cast<double>(swaps_proposed);
  }

  std::uint64_t coassign_count(NodeId i, NodeId j) const { return coassign_tally.at(std::size_t{i} * n + j); }
};

/// Non-empty when relabelling for p11 >= p22 does not preserve the target,
/// i.e. the prior is not invariant under exchanging group names.
inline std::optional<std::string> identifiability_warning(const Hyperparameters& h) {
  if (!h.block_symmetric())
    return "block priors differ between (1,1) and (2,2); relabelling to enforce p11 >= p22 biases the posterior";
  if (!h.label_symmetric())
    return "label prior is not 1/2 for every node; relabelling to enforce p11 >= p22 biases the posterior";
  return std::nullopt;
}

inline Rng chain_rng(std::uint64_t seed, std::int64_t chain_index) {
  return make_rng(seed, {0x636861696eULL, static_cast<std::uint64_t>(chain_index)});
}

/// Draws p from its conditional given the current block counts.
inline void gibbs_update_probs(ChainState& s, const Hyperparameters& h, Rng& rng) {
  const auto& k = s.counts;
  s.p.p11 = sample_beta(rng, static_cast<double>(k.M11) + h.block11.a, static_cast<double>(k.m11 - k.M11) + h.block11.b);
  s.p.p12 = sample_beta(rng, static_cast<double>(k.M12) + h.block12.a, static_cast<double>(k.m12 - k.M12) + h.block12.b);
  s.p.p22 = sample_beta(rng, static_cast<double>(k.M22) + h.block22.a, static_cast<double>(k.m22 - k.M22) + h.block22.b);
  s.log_lik = log_likelihood(s.counts, s.p);
}

/// Renames the groups when p11 < p22. The likelihood is unchanged.
inline void enforce_identifiability(ChainState& s) noexcept {
  if (!(s.p.p11 < s.p.p22)) return;
  for (auto& v : s.c) v = other_group(v);
  std::swap(s.p.p11, s.p.p22);
  s.counts = s.counts.swapped();
}

inline ChainState init_chain(const Graph& g, const Hyperparameters& h, const ChainConfig& cfg, Rng& rng) {
  const auto n = g.n();
  if (h.pi.size() != n) throw ConfigError("label prior length does not match node count");
  ChainState s;
  s.c.assign(n, 1);
  switch (cfg.init) {
    case InitStrategy::random_labels:
      for (std::size_t i = 0; i < n; ++i) s.c[i] = sample_uniform(rng) < h.pi[i] ? 1 : 2;
      break;
    case InitStrategy::degree_split: {
      if (n == 0) break;
      std::vector<double> deg(n);
      for (NodeId i = 0; i < n; ++i) deg[i] = static_cast<double>(g.degree(i));
      auto sorted = deg;
      std::sort(sorted.begin(), sorted.end());
      const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
      for (NodeId i = 0; i < n; ++i) s.c[i] = deg[i] >= median ? 1 : 2;
      break;
    }
  }
  s.p.p11 = sample_beta(rng, h.block11.a, h.block11.b);
  s.p.p12 = sample_beta(rng, h.block12.a, h.block12.b);
  s.p.p22 = sample_beta(rng, h.block22.a, h.block22.b);
  s.counts = block_counts(g, s.c);
  s.log_lik = log_likelihood(s.counts, s.p);
  enforce_identifiability(s);
  return s;
}

/// Initial state of chain `chain_index`; identical arguments give an identical state.
inline ChainState init_chain(const Graph& g, const Hyperparameters& h, const ChainConfig& cfg,
                             std::int64_t chain_index) {
  auto rng = chain_rng(cfg.seed, chain_index);
  return init_chain(g, h, cfg, rng);
}

/// One Metropolis pass over all nodes in a fresh random order, proposing to
/// flip each node's group. Returns the number of accepted flips.
inline std::uint64_t label_sweep(ChainState& s, const Graph& g, const Hyperparameters& h, Rng& rng) {
  const auto n = g.n();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::shuffle(order.begin(), order.end(), rng);

  std::uint64_t accepted = 0;
  for (NodeId i : order) {
    const auto [delta, next] = log_likelihood_delta(g, s.c, s.counts, s.p, i);
    const double log_ratio =
        delta + log_prior_label(other_group(s.c[i]), h.pi[i]) - log_prior_label(s.c[i], h.pi[i]);
    bool accept = log_ratio >= 0.0;
    if (!accept && !std::isnan(log_ratio)) accept = std::log(sample_uniform(rng)) < log_ratio;
    if (!accept) continue;
    s.c[i] = other_group(s.c[i]);
    s.counts = next;
    s.log_lik += delta;
    ++accepted;
  }
  return accepted;
}

namespace detail {

inline PosteriorSamples empty_samples(std::size_t n, const ChainConfig& cfg) {
  PosteriorSamples out;
  out.n = n;
  out.label_tally.assign(n, 0);
  out.size_tally.assign(n + 1, 0);
  out.coassign_enabled = cfg.coassign;
  if (cfg.coassign) out.coassign_tally.assign(n * n, 0);
  out.labels_stored = cfg.store_labels;
  return out;
}

inline void record(PosteriorSamples& out, const ChainState& s) {
  const auto n = out.n;
  out.draws.push_back(s.p);
  out.log_lik.push_back(s.log_lik);
  ++out.retained;
  std::size_t n1 = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (s.c[i] == 1) {
      ++out.label_tally[i];
      ++n1;
    }
  ++out.size_tally[n1];
  if (out.coassign_enabled) {
    for (std::size_t i = 0; i < n; ++i) {
      auto* row = out.coassign_tally.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += (s.c[i] == s.c[j]);
    }
  }
  if (out.labels_stored) out.label_draws.push_back(s.c);
}

inline PosteriorSamples run_single_chain(const Graph& g, const Hyperparameters& h, const ChainConfig& cfg,
                                         std::int64_t chain_index) {
  auto rng = chain_rng(cfg.seed, chain_index);
  auto state = init_chain(g, h, cfg, rng);
  auto out = empty_samples(g.n(), cfg);
  out.draws.reserve(static_cast<std::size_t>(cfg.retained_per_chain()));
  out.log_lik.reserve(static_cast<std::size_t>(cfg.retained_per_chain()));

  for (std::int64_t it = 0; it < cfg.total_samples; ++it) {
    const auto accepted = label_sweep(state, g, h, rng);
    gibbs_update_probs(state, h, rng);
    enforce_identifiability(state);
    if (it < cfg.burn_in) continue;
    out.swaps_accepted += accepted;
    out.swaps_proposed += g.n();
    if ((it - cfg.burn_in + 1) % cfg.thin == 0) record(out, state);
  }
  return out;
}

inline void append(PosteriorSamples& into, const PosteriorSamples& from) {
  into.retained += from.retained;
  into.draws.insert(into.draws.end(), from.draws.begin(), from.draws.end());
  into.log_lik.insert(into.log_lik.end(), from.log_lik.begin(), from.log_lik.end());
  for (std::size_t i = 0; i < into.label_tally.size(); ++i) into.label_tally[i] += from.label_tally[i];
  for (std::size_t i = 0; i < into.size_tally.size(); ++i) into.size_tally[i] += from.size_tally[i];
  for (std::size_t i = 0; i < into.coassign_tally.size(); ++i) into.coassign_tally[i] += from.coassign_tally[i];
  into.label_draws.insert(into.label_draws.end(), from.label_draws.begin(), from.label_draws.end());
  into.swaps_accepted += from.swaps_accepted;
  into.swaps_proposed += from.swaps_proposed;
}

}  // namespace detail

/// Runs `cfg.chains` independent chains (on up to `cfg.threads` workers) and
/// pools their retained draws in chain order. With several chains the
/// per-chain results are kept in `chains`.
inline PosteriorSamples run_chain(const Graph& g, const Hyperparameters& h, const ChainConfig& cfg) {
  cfg.validate();
  h.validate();
  if (h.pi.size() != g.n()) throw ConfigError("label prior length does not match node count");

  const auto count = static_cast<std::size_t>(cfg.chains);
  if (count == 1) return detail::run_single_chain(g, h, cfg, 0);

  std::vector<PosteriorSamples> per_chain(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) per_chain[k] = detail::run_single_chain(g, h, cfg, k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (std::size_t k; (k = next.fetch_add(1)) < count;) {
            try {
              per_chain[k] = detail::run_single_chain(g, h, cfg, static_cast<std::int64_t>(k));
            } catch (...) {
              errors[k] = std::current_exception();
            }
          }
        });
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  auto pooled = detail::empty_samples(g.n(), cfg);
  for (const auto& chain : per_chain) detail::append(pooled, chain);
  pooled.chains = std::move(per_chain);
  return pooled;
}

}  // namespace meso
