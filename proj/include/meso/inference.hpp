#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "meso/errors.hpp"
#include "meso/graph.hpp"
#include "meso/model.hpp"
#include "meso/sampler.hpp"

namespace meso {

enum class Structure { assortative, core_periphery, disassortative };

inline const char* to_string(Structure s) noexcept {
  switch (s) {
    case Structure::assortative: return "assortative";
    case Structure::core_periphery: return "core_periphery";
    case Structure::disassortative: return "disassortative";
  }
  return "?";
}

/// Category of a single draw. Compares p12 against the smaller and larger of
/// the within-block probabilities, so the answer does not depend on which
/// group is called 1. Ties go to core-periphery.
inline Structure classify(const BlockProbs& p) noexcept {
  const double lo = std::min(p.p11, p.p22);
  const double hi = std::max(p.p11, p.p22);
  if (p.p12 < lo) return Structure::assortative;
  if (p.p12 > hi) return Structure::disassortative;
  return Structure::core_periphery;
}

struct StructureVerdict {
  double p_assortative = 0.0;
  double p_core_periphery = 0.0;
  double p_disassortative = 0.0;
  std::int64_t n_samples = 0;
  std::vector<StructureVerdict> per_chain;

  double probability(Structure s) const noexcept {
    switch (s) {
      case Structure::assortative: return p_assortative;
      case Structure::core_periphery: return p_core_periphery;
      case Structure::disassortative: return p_disassortative;
    }
    return 0.0;
  }

  Structure most_probable() const noexcept {
    Structure best = Structure::assortative;
    for (auto s : {Structure::core_periphery, Structure::disassortative})
      if (probability(s) > probability(best)) best = s;
    return best;
  }
};

/// Half the L1 distance between two verdicts' category probabilities.
inline double total_variation(const StructureVerdict& a, const StructureVerdict& b) noexcept {
  return 0.5 * (std::abs(a.p_assortative - b.p_assortative) + std::abs(a.p_core_periphery - b.p_core_periphery) +
                std::abs(a.p_disassortative - b.p_disassortative));
}

namespace detail {

inline StructureVerdict count_structures(const std::vector<BlockProbs>& draws) {
  std::int64_t counts[3] = {0, 0, 0};
  for (const auto& p : draws) ++counts[static_cast<int>(classify(p))];
  const auto total = static_cast<double>(draws.size());
  StructureVerdict v;
  v.n_samples = static_cast<std::int64_t>(draws.size());
  v.p_assortative = static_cast<double>(counts[0]) / total;
  v.p_disassortative = static_cast<double>(counts[2]) / total;
  v.p_core_periphery = static_cast<double>(counts[1]) / total;
  return v;
}

inline void require_samples(const PosteriorSamples& s) {
  if (s.retained <= 0 || s.draws.empty()) throw DataError("posterior sample set is empty");
}

}  // namespace detail

/// Posterior probability of each structure: the fraction of retained draws
/// falling in that category.
inline StructureVerdict classify_structure(const PosteriorSamples& samples) {
  detail::require_samples(samples);
  auto v = detail::count_structures(samples.draws);
  for (const auto& chain : samples.chains) v.per_chain.push_back(detail::count_structures(chain.draws));
  return v;
}

/// Posterior probability that each node is in group 1.
inline std::vector<double> membership_probabilities(const PosteriorSamples& samples) {
  detail::require_samples(samples);
  std::vector<double> out(samples.n);
  const auto total = static_cast<double>(samples.retained);
  for (std::size_t i = 0; i < samples.n; ++i) out[i] = static_cast<double>(samples.label_tally[i]) / total;
  return out;
}

/// Dense symmetric n x n matrix, row-major.
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// Posterior probability that nodes i and j share a group.
inline SquareMatrix coassignment_matrix(const PosteriorSamples& samples) {
  if (!samples.coassign_enabled)
    throw ConfigError("co-assignment tallies were not collected; rerun with --coassign");
  detail::require_samples(samples);
  SquareMatrix out{samples.n, std::vector<double>(samples.n * samples.n)};
  const auto total = static_cast<double>(samples.retained);
  for (std::size_t k = 0; k < out.data.size(); ++k) out.data[k] = static_cast<double>(samples.coassign_tally[k]) / total;
  return out;
}

/// Normalized histogram of the group-1 size over 0..n.
inline std::vector<double> group_size_posterior(const PosteriorSamples& samples) {
  detail::require_samples(samples);
  std::vector<double> out(samples.size_tally.size());
  const auto total = static_cast<double>(samples.retained);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<double>(samples.size_tally[k]) / total;
  return out;
}

struct ParameterSummary {
  std::vector<double> bin_edges;  // bins + 1 entries over [0, 1]
  std::vector<double> mass;       // sums to 1
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
};

struct DensitySummary {
  ParameterSummary p11, p12, p22;
  double p11_gt_p12 = 0.0;
  double p12_gt_p22 = 0.0;
  double p11_gt_p22 = 0.0;
};

namespace detail {

// Linear interpolation between order statistics (R type 7).
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline ParameterSummary summarize(std::vector<double> x, std::size_t bins) {
  ParameterSummary s;
  s.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) s.bin_edges[b] = static_cast<double>(b) / static_cast<double>(bins);
  s.mass.assign(bins, 0.0);
  const auto total = static_cast<double>(x.size());
  double sum = 0.0;
  for (double v : x) {
    auto b = static_cast<std::size_t>(std::floor(v * static_cast<double>(bins)));
    s.mass[std::min(b, bins - 1)] += 1.0;
    sum += v;
  }
  for (auto& m : s.mass) m /= total;
  s.mean = sum / total;
  double ss = 0.0;
  for (double v : x) ss += (v - s.mean) * (v - s.mean);
  s.sd = x.size() > 1 ? std::sqrt(ss / (total - 1.0)) : 0.0;
  std::sort(x.begin(), x.end());
  s.q025 = quantile_sorted(x, 0.025);
  s.q50 = quantile_sorted(x, 0.5);
  s.q975 = quantile_sorted(x, 0.975);
  return s;
}

}  // namespace detail

/// Histograms, moments and quantiles of each block probability, plus the
/// probability that one exceeds another within the same draw.
inline DensitySummary density_summary(const PosteriorSamples& samples, std::size_t bins = 50) {
  detail::require_samples(samples);
  if (bins < 2) throw ConfigError("density summaries need at least 2 bins");
  std::vector<double> a, b, c;
  a.reserve(samples.draws.size());
  b.reserve(samples.draws.size());
  c.reserve(samples.draws.size());
  std::int64_t gt_11_12 = 0, gt_12_22 = 0, gt_11_22 = 0;
  for (const auto& p : samples.draws) {
    a.push_back(p.p11);
    b.push_back(p.p12);
    c.push_back(p.p22);
    gt_11_12 += p.p11 > p.p12;
    gt_12_22 += p.p12 > p.p22;
    gt_11_22 += p.p11 > p.p22;
  }
  const auto total = static_cast<double>(samples.draws.size());
  DensitySummary d;
  d.p11 = detail::summarize(std::move(a), bins);
  d.p12 = detail::summarize(std::move(b), bins);
  d.p22 = detail::summarize(std::move(c), bins);
  d.p11_gt_p12 = static_cast<double>(gt_11_12) / total;
  d.p12_gt_p22 = static_cast<double>(gt_12_22) / total;
  d.p11_gt_p22 = static_cast<double>(gt_11_22) / total;
  return d;
}

// ---------------------------------------------------------------------------
// Exact posterior for small graphs.

inline constexpr std::size_t exact_max_nodes = 14;

/// Probabilities of the three orderings of independent Beta variables
/// X11, X12, X22, each integrated numerically over the value of X12.
/// `mass` integrates the X12 density alone and measures quadrature error.
struct OrderingProbabilities {
  double assortative = 0.0;     // X12 < min(X11, X22)
  double core_periphery = 0.0;  // X12 between the two
  double disassortative = 0.0;  // X12 > max(X11, X22)
  double mass = 0.0;
};

/// Composite Simpson over `points` (odd) equally spaced nodes on [0, 1].
/// When the X12 density is unbounded at an end point the integral is taken
/// over its CDF instead, u = F12(x).
inline OrderingProbabilities ordering_probabilities(const BetaPrior& b11, const BetaPrior& b12, const BetaPrior& b22,
                                                    std::size_t points = 4097) {
  if (points < 3 || points % 2 == 0) throw ConfigError("quadrature needs an odd number of points >= 3");
  using boost::math::beta_distribution;
  const beta_distribution<double> d11(b11.a, b11.b), d12(b12.a, b12.b), d22(b22.a, b22.b);
  const bool density_bounded = b12.a >= 1.0 && b12.b >= 1.0;
  const double h = 1.0 / static_cast<double>(points - 1);

  OrderingProbabilities out;
  for (std::size_t k = 0; k < points; ++k) {
    const double t = static_cast<double>(k) * h;
    double x = t;
    double weight_density = 1.0;
    if (density_bounded) {
      weight_density = boost::math::pdf(d12, x);
    } else {
      x = boost::math::quantile(d12, t);
    }
    const double F11 = boost::math::cdf(d11, x);
    const double F22 = boost::math::cdf(d22, x);
    const double simpson = (k == 0 || k == points - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    const double w = simpson * weight_density;
    out.assortative += w * (1.0 - F11) * (1.0 - F22);
    out.disassortative += w * F11 * F22;
    out.core_periphery += w * ((1.0 - F11) * F22 + F11 * (1.0 - F22));
    out.mass += w;
  }
  const double scale = h / 3.0;
  out.assortative *= scale;
  out.disassortative *= scale;
  out.core_periphery *= scale;
  out.mass *= scale;
  return out;
}

/// Exact posterior structure probabilities for a small graph, by enumerating
/// every label vector and integrating p out analytically (label weights) and
/// numerically (ordering probabilities).
///
/// The core-periphery probability is reported as the remainder so the three
/// values sum to one; the directly integrated value is available through
/// `exact_structure_details`.
struct ExactPosterior {
  StructureVerdict verdict;
  double core_periphery_integrated = 0.0;
  double max_quadrature_error = 0.0;  // max |mass - 1| over distinct count tuples
  std::size_t label_vectors = 0;
  std::size_t distinct_counts = 0;
};

inline ExactPosterior exact_structure_details(const Graph& g, const Hyperparameters& h,
                                              std::size_t quadrature_points = 4097) {
  const auto n = g.n();
  if (n > exact_max_nodes)
    throw ConfigError("exact enumeration supports at most " + std::to_string(exact_max_nodes) + " nodes, graph has " +
                      std::to_string(n));
  h.validate();
  if (h.pi.size() != n) throw ConfigError("label prior length does not match node count");
  if (!h.block_symmetric()) throw ConfigError("exact enumeration requires block-symmetric Beta priors");

  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t>;
  std::map<Key, OrderingProbabilities> cache;
  const std::size_t total = std::size_t{1} << n;

  std::vector<double> log_w(total);
  std::vector<const OrderingProbabilities*> probs(total);
  LabelVector c(n);
  for (std::size_t mask = 0; mask < total; ++mask) {
    for (std::size_t i = 0; i < n; ++i) c[i] = (mask >> i) & 1u ? 2 : 1;
    const auto k = block_counts(g, c);
    log_w[mask] = log_marginal_likelihood(k, h) + log_prior_labels(c, h);
    Key key{k.n1, k.M11, k.M12, k.M22};
    auto it = cache.find(key);
    if (it == cache.end()) {
      const auto post = [](std::int64_t M, std::int64_t m, const BetaPrior& prior) {
        return BetaPrior{static_cast<double>(M) + prior.a, static_cast<double>(m - M) + prior.b};
      };
      it = cache
               .emplace(key, ordering_probabilities(post(k.M11, k.m11, h.block11), post(k.M12, k.m12, h.block12),
                                                    post(k.M22, k.m22, h.block22), quadrature_points))
               .first;
    }
    probs[mask] = &it->second;
  }

  const double top = *std::max_element(log_w.begin(), log_w.end());
  double z = 0.0, assort = 0.0, disassort = 0.0, cp = 0.0;
  for (std::size_t mask = 0; mask < total; ++mask) {
    const double w = std::exp(log_w[mask] - top);
    z += w;
    assort += w * probs[mask]->assortative;
    disassort += w * probs[mask]->disassortative;
    cp += w * probs[mask]->core_periphery;
  }

  ExactPosterior out;
  out.verdict.p_assortative = assort / z;
  out.verdict.p_disassortative = disassort / z;
  out.verdict.p_core_periphery = 1.0 - out.verdict.p_assortative - out.verdict.p_disassortative;
  out.core_periphery_integrated = cp / z;
  out.label_vectors = total;
  out.distinct_counts = cache.size();
  for (const auto& [key, value] : cache)
    out.max_quadrature_error = std::max(out.max_quadrature_error, std::abs(value.mass - 1.0));
  return out;
}

inline StructureVerdict exact_structure_posterior(const Graph& g, const Hyperparameters& h,
                                                  std::size_t quadrature_points = 4097) {
  return exact_structure_details(g, h, quadrature_points).verdict;
}

}  // namespace meso
