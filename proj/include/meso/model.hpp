#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "meso/errors.hpp"
#include "meso/graph.hpp"

namespace meso {

/// Group assignment per node; every entry is 1 or 2.
using LabelVector = std::vector<std::uint8_t>;

inline constexpr std::uint8_t other_group(std::uint8_t c) noexcept { return static_cast<std::uint8_t>(3 - c); }

inline void validate_labels(std::span<const std::uint8_t> c, std::size_t n) {
  if (c.size() != n)
    throw ConfigError("label vector has length " + std::to_string(c.size()) + ", graph has " +
                      std::to_string(n) + " nodes");
  for (auto v : c)
    if (v != 1 && v != 2) throw ConfigError("labels must be 1 or 2");
}

struct BlockProbs {
  double p11 = 0.5;
  double p12 = 0.5;
  double p22 = 0.5;

  friend bool operator==(const BlockProbs&, const BlockProbs&) = default;
};

/// Sufficient statistics of the two-block likelihood: realized edges `M*`,
/// possible pairs `m*`, and block sizes.
struct BlockCounts {
  std::int64_t M11 = 0, M12 = 0, M22 = 0;
  std::int64_t m11 = 0, m12 = 0, m22 = 0;
  std::int64_t n1 = 0, n2 = 0;

  static BlockCounts from_sizes(std::int64_t n1, std::int64_t n2, std::int64_t M11, std::int64_t M12,
                                std::int64_t M22) {
    return {M11, M12, M22, n1 * (n1 - 1) / 2, n1 * n2, n2 * (n2 - 1) / 2, n1, n2};
  }

  std::int64_t pairs() const noexcept { return m11 + m12 + m22; }

  /// The same statistics with the group names exchanged.
  BlockCounts swapped() const noexcept { return {M22, M12, M11, m22, m12, m11, n2, n1}; }

  friend bool operator==(const BlockCounts&, const BlockCounts&) = default;
};

struct BetaPrior {
  double a = 1.0;
  double b = 1.0;

  friend bool operator==(const BetaPrior&, const BetaPrior&) = default;
};

/// Beta priors on each block probability plus per-node group-1 prior
/// probabilities.
struct Hyperparameters {
  BetaPrior block11;
  BetaPrior block12;
  BetaPrior block22;
  std::vector<double> pi;

  static Hyperparameters uniform(std::size_t n, double a0 = 1.0, double b0 = 1.0, double pi0 = 0.5) {
    Hyperparameters h{{a0, b0}, {a0, b0}, {a0, b0}, std::vector<double>(n, pi0)};
    h.validate();
    return h;
  }

  void validate() const {
    for (const auto* prior : {&block11, &block12, &block22})
      if (!(prior->a > 0.0) || !(prior->b > 0.0) || !std::isfinite(prior->a) || !std::isfinite(prior->b))
        throw ConfigError("Beta shape parameters must be positive and finite");
    for (double p : pi)
      if (!(p > 0.0 && p < 1.0)) throw ConfigError("label prior probabilities must lie strictly inside (0,1)");
  }

  /// Whether exchanging the group names leaves the prior unchanged.
  bool block_symmetric() const noexcept { return block11 == block22; }

  bool label_symmetric() const noexcept {
    for (double p : pi)
      if (p != 0.5) return false;
    return true;
  }
};

namespace detail {

// k * ln(x) with 0 * ln(0) = 0.
inline double xlogx(std::int64_t k, double log_x) noexcept {
  return k == 0 ? 0.0 : static_cast<double>(k) * log_x;
}

inline double block_term(std::int64_t M, std::int64_t m, double p) noexcept {
  return xlogx(M, std::log(p)) + xlogx(m - M, std::log1p(-p));
}

inline double block_term_delta(std::int64_t dM, std::int64_t dmiss, double p) noexcept {
  return xlogx(dM, std::log(p)) + xlogx(dmiss, std::log1p(-p));
}

}  // namespace detail

inline BlockCounts block_counts(const Graph& g, std::span<const std::uint8_t> c) {
  validate_labels(c, g.n());
  std::int64_t n1 = 0;
  for (auto v : c) n1 += (v == 1);
  std::int64_t M[3] = {0, 0, 0};  // 11, 12, 22
  for (auto [i, j] : g.edges()) ++M[c[i] + c[j] - 2];
  return BlockCounts::from_sizes(n1, static_cast<std::int64_t>(g.n()) - n1, M[0], M[1], M[2]);
}

/// Natural log of the two-block Bernoulli likelihood; -inf for impossible
/// configurations such as p12 = 0 with a realized between-block edge.
inline double log_likelihood(const BlockCounts& k, const BlockProbs& p) noexcept {
  return detail::block_term(k.M11, k.m11, p.p11) + detail::block_term(k.M12, k.m12, p.p12) +
         detail::block_term(k.M22, k.m22, p.p22);
}

struct LikelihoodDelta {
  double delta = 0.0;
  BlockCounts counts;
};

/// Change in log-likelihood from flipping node `i` to the other group.
/// Touches only the neighbours of `i`.
inline LikelihoodDelta log_likelihood_delta(const Graph& g, std::span<const std::uint8_t> c,
                                            const BlockCounts& k, const BlockProbs& p, NodeId i) {
  if (i >= g.n()) throw std::out_of_range("node id " + std::to_string(i) + " out of range");
  std::int64_t same = 0, other = 0;
  const auto ci = c[i];
  for (NodeId j : g.neighbors(i)) (c[j] == ci ? same : other) += 1;

  BlockCounts next;
  if (ci == 1) {
    next = BlockCounts::from_sizes(k.n1 - 1, k.n2 + 1, k.M11 - same, k.M12 + same - other, k.M22 + other);
  } else {
    next = BlockCounts::from_sizes(k.n1 + 1, k.n2 - 1, k.M11 + other, k.M12 + same - other, k.M22 - same);
  }

  const auto miss = [](std::int64_t M, std::int64_t m) { return m - M; };
  double delta = detail::block_term_delta(next.M11 - k.M11, miss(next.M11, next.m11) - miss(k.M11, k.m11), p.p11) +
                 detail::block_term_delta(next.M12 - k.M12, miss(next.M12, next.m12) - miss(k.M12, k.m12), p.p12) +
                 detail::block_term_delta(next.M22 - k.M22, miss(next.M22, next.m22) - miss(k.M22, k.m22), p.p22);
  return {delta, next};
}

inline double log_prior_label(std::uint8_t c, double pi) noexcept {
  return c == 1 ? std::log(pi) : std::log1p(-pi);
}

inline double log_prior_labels(std::span<const std::uint8_t> c, const Hyperparameters& h) {
  if (c.size() != h.pi.size()) throw ConfigError("label vector and prior have different lengths");
  double total = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) total += log_prior_label(c[i], h.pi[i]);
  return total;
}

inline double log_beta_function(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

/// log P(A | c) with every block probability integrated against its Beta prior.
inline double log_marginal_likelihood(const BlockCounts& k, const Hyperparameters& h) {
  const auto term = [](std::int64_t M, std::int64_t m, const BetaPrior& prior) {
    if (m == 0) return 0.0;
    return log_beta_function(static_cast<double>(M) + prior.a, static_cast<double>(m - M) + prior.b) -
           log_beta_function(prior.a, prior.b);
  };
  return term(k.M11, k.m11, h.block11) + term(k.M12, k.m12, h.block12) + term(k.M22, k.m22, h.block22);
}

}  // namespace meso
