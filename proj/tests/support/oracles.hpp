#pragma once

// Brute-force reference computations used only by tests. None of these call
// into the incremental or closed-form code paths they are compared against.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/distributions/beta.hpp>

#include "meso/graph.hpp"
#include "meso/model.hpp"

namespace meso::oracle {

/// Block counts by looking at every node pair through has_edge.
inline BlockCounts counts_by_pairs(const Graph& g, const LabelVector& c) {
  BlockCounts k;
  for (auto v : c) (v == 1 ? k.n1 : k.n2) += 1;
  for (NodeId i = 0; i < g.n(); ++i) {
    for (NodeId j = i + 1; j < g.n(); ++j) {
      const int pair = c[i] + c[j];
      const bool e = g.has_edge(i, j);
      if (pair == 2) {
        ++k.m11;
        k.M11 += e;
      } else if (pair == 3) {
        ++k.m12;
        k.M12 += e;
      } else {
        ++k.m22;
        k.M22 += e;
      }
    }
  }
  return k;
}

/// Log-likelihood as a product over node pairs, accumulated in long double.
inline long double log_likelihood_by_pairs(const Graph& g, const LabelVector& c, const BlockProbs& p) {
  long double total = 0.0L;
  for (NodeId i = 0; i < g.n(); ++i) {
    for (NodeId j = i + 1; j < g.n(); ++j) {
      const int pair = c[i] + c[j];
      const long double q = pair == 2 ? p.p11 : pair == 3 ? p.p12 : p.p22;
      total += g.has_edge(i, j) ? std::log(q) : std::log1p(-q);
    }
  }
  return total;
}

inline LabelVector labels_from_mask(std::size_t mask, std::size_t n) {
  LabelVector c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = (mask >> i) & 1u ? 2 : 1;
  return c;
}

inline std::size_t mask_from_labels(const LabelVector& c) {
  std::size_t mask = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] == 2) mask |= std::size_t{1} << i;
  return mask;
}

/// Exact P(c | A, p) over all 2^n label vectors.
inline std::vector<double> label_posterior_fixed_p(const Graph& g, const BlockProbs& p, const std::vector<double>& pi) {
  const std::size_t total = std::size_t{1} << g.n();
  std::vector<long double> logw(total);
  long double top = -INFINITY;
  for (std::size_t mask = 0; mask < total; ++mask) {
    const auto c = labels_from_mask(mask, g.n());
    long double lp = log_likelihood_by_pairs(g, c, p);
    for (std::size_t i = 0; i < c.size(); ++i) lp += c[i] == 1 ? std::log(pi[i]) : std::log1p(-pi[i]);
    logw[mask] = lp;
    top = std::max(top, lp);
  }
  std::vector<double> out(total);
  long double z = 0.0L;
  for (std::size_t k = 0; k < total; ++k) z += std::exp(logw[k] - top);
  for (std::size_t k = 0; k < total; ++k) out[k] = static_cast<double>(std::exp(logw[k] - top) / z);
  return out;
}

/// log of the integral of p^M (1-p)^(m-M) against a Beta(a, b) density,
/// by adaptive Gauss-Kronrod quadrature.
inline double log_block_marginal_by_quadrature(std::int64_t M, std::int64_t m, double a, double b) {
  const boost::math::beta_distribution<double> prior(a, b);
  auto f = [&](double x) {
    return std::pow(x, static_cast<double>(M)) * std::pow(1.0 - x, static_cast<double>(m - M)) *
           boost::math::pdf(prior, x);
  };
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 8, 1e-11);
  return std::log(value);
}

/// Erdos-Renyi test graph on n nodes named 0..n-1.
inline Graph random_graph(std::size_t n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution edge(density);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (edge(rng)) edges.emplace_back(i, j);
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = std::to_string(i);
  return Graph::from_edges(std::move(names), edges);
}

inline LabelVector random_labels(std::size_t n, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  LabelVector c(n);
  for (auto& v : c) v = coin(rng) ? 1 : 2;
  return c;
}

}  // namespace meso::oracle
