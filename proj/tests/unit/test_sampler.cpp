#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "meso/datasets.hpp"
#include "meso/sampler.hpp"
#include "support/oracles.hpp"

using namespace meso;

namespace {

Graph isolated(std::size_t n) {
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = std::to_string(i);
  std::vector<std::pair<NodeId, NodeId>> none;
  return Graph::from_edges(std::move(names), none);
}

ChainState state_for(const Graph& g, LabelVector c, BlockProbs p) {
  ChainState s;
  s.c = std::move(c);
  s.p = p;
  s.counts = block_counts(g, s.c);
  s.log_lik = log_likelihood(s.counts, s.p);
  return s;
}

}  // namespace

TEST(ChainConfig, Validation) {
  ChainConfig cfg;
  cfg.total_samples = 100;
  cfg.burn_in = 200;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.burn_in = 100;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.burn_in = 10;
  cfg.thin = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.thin = 1;
  cfg.chains = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(InitChain, DegreeSplitPutsHubsInGroupOne) {
  auto g = load_dataset("karate");
  auto h = Hyperparameters::uniform(g.n());
  ChainConfig cfg;
  cfg.init = InitStrategy::degree_split;
  auto s = init_chain(g, h, cfg, 0);

  std::vector<std::size_t> deg;
  for (NodeId i = 0; i < g.n(); ++i) deg.push_back(g.degree(i));
  std::sort(deg.begin(), deg.end());
  const double median = 0.5 * static_cast<double>(deg[16] + deg[17]);
  // identifiability may have renamed the groups; hubs must share a group and
  // every node at or above the median must be with them
  const auto hub_group = s.c[*g.id_of("34")];
  for (NodeId i = 0; i < g.n(); ++i)
    EXPECT_EQ(s.c[i] == hub_group, static_cast<double>(g.degree(i)) >= median) << g.name(i);
  EXPECT_EQ(s.c[*g.id_of("1")], hub_group);
  EXPECT_EQ(s.c[*g.id_of("33")], hub_group);
}

TEST(InitChain, DegreeTiesGoToGroupOne) {
  auto g = parse_edge_list("a b\n");
  ChainConfig cfg;
  cfg.init = InitStrategy::degree_split;
  auto s = init_chain(g, Hyperparameters::uniform(2), cfg, 0);
  EXPECT_EQ(s.c[0], s.c[1]);
}

TEST(InitChain, Deterministic) {
  auto g = load_dataset("karate");
  auto h = Hyperparameters::uniform(g.n());
  ChainConfig cfg;
  cfg.seed = 99;
  auto a = init_chain(g, h, cfg, 3);
  auto b = init_chain(g, h, cfg, 3);
  EXPECT_EQ(a.c, b.c);
  EXPECT_EQ(a.p, b.p);
  EXPECT_EQ(a.counts, block_counts(g, a.c));
  EXPECT_GE(a.p.p11, a.p.p22);
  auto other = init_chain(g, h, cfg, 4);
  EXPECT_FALSE(other.c == a.c && other.p == a.p);
}

TEST(LabelSweep, FlatTargetAcceptsEveryProposal) {
  std::mt19937_64 gen(1);
  auto g = oracle::random_graph(15, 0.3, gen);
  auto h = Hyperparameters::uniform(g.n());
  auto s = state_for(g, oracle::random_labels(g.n(), gen), {0.5, 0.5, 0.5});
  Rng rng = make_rng(5);
  for (int sweep = 0; sweep < 20; ++sweep) EXPECT_EQ(label_sweep(s, g, h, rng), g.n());
}

TEST(LabelSweep, SingleIsolatedNodeIsUniform) {
  auto g = isolated(1);
  auto h = Hyperparameters::uniform(1);
  auto s = state_for(g, {1}, {0.3, 0.2, 0.1});
  Rng rng = make_rng(2);
  int ones = 0;
  const int sweeps = 20000;
  for (int t = 0; t < sweeps; ++t) {
    label_sweep(s, g, h, rng);
    ones += s.c[0] == 1;
  }
  EXPECT_NEAR(ones / double(sweeps), 0.5, 3 * std::sqrt(0.25 / sweeps));
}

TEST(LabelSweep, KeepsCountsConsistent) {
  std::mt19937_64 gen(4);
  auto g = oracle::random_graph(20, 0.25, gen);
  auto h = Hyperparameters::uniform(g.n());
  auto s = state_for(g, oracle::random_labels(g.n(), gen), {0.4, 0.1, 0.3});
  Rng rng = make_rng(9);
  for (int t = 0; t < 200; ++t) {
    label_sweep(s, g, h, rng);
    ASSERT_EQ(s.counts, block_counts(g, s.c));
    ASSERT_NEAR(s.log_lik, log_likelihood(s.counts, s.p), 1e-8);
  }
}

TEST(LabelSweep, MatchesEnumeratedConditionalAtFixedP) {
  std::mt19937_64 gen(31);
  auto g = oracle::random_graph(7, 0.45, gen);
  auto h = Hyperparameters::uniform(g.n());
  h.pi = {0.5, 0.3, 0.7, 0.5, 0.5, 0.6, 0.4};
  const BlockProbs p{0.7, 0.25, 0.45};
  const auto exact = oracle::label_posterior_fixed_p(g, p, h.pi);

  auto s = state_for(g, LabelVector(7, 1), p);
  Rng rng = make_rng(77);
  std::vector<double> freq(exact.size(), 0.0);
  const int sweeps = 200000;
  for (int t = 0; t < 1000; ++t) label_sweep(s, g, h, rng);
  for (int t = 0; t < sweeps; ++t) {
    label_sweep(s, g, h, rng);
    freq[oracle::mask_from_labels(s.c)] += 1.0 / sweeps;
  }
  double tv = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k) tv += 0.5 * std::abs(freq[k] - exact[k]);
  EXPECT_LT(tv, 0.02);
}

TEST(LabelSweep, FlatTargetStationarity) {
  std::mt19937_64 gen(8);
  auto g = oracle::random_graph(5, 0.5, gen);
  auto h = Hyperparameters::uniform(g.n());
  auto s = state_for(g, LabelVector(5, 1), {0.35, 0.35, 0.35});
  Rng rng = make_rng(123);
  std::vector<int> ones(5, 0);
  const int sweeps = 10000;
  for (int t = 0; t < sweeps; ++t) {
    label_sweep(s, g, h, rng);
    for (int i = 0; i < 5; ++i) ones[i] += s.c[i] == 1;
  }
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(ones[i] / double(sweeps), 0.5, 3 * std::sqrt(0.25 / sweeps));
}

TEST(GibbsUpdate, EmptyBlockDrawsFromPrior) {
  auto g = isolated(1);  // n1 = 1: every block has zero possible pairs
  auto h = Hyperparameters::uniform(1);
  auto s = state_for(g, {1}, {});
  Rng rng = make_rng(3);
  const int draws = 20000;
  double sum = 0.0, sumsq = 0.0;
  for (int t = 0; t < draws; ++t) {
    gibbs_update_probs(s, h, rng);
    sum += s.p.p11;
    sumsq += s.p.p11 * s.p.p11;
  }
  const double mean = sum / draws;
  EXPECT_NEAR(mean, 0.5, 3 * std::sqrt(1.0 / 12 / draws));
  EXPECT_NEAR(sumsq / draws - mean * mean, 1.0 / 12, 0.005);
}

TEST(GibbsUpdate, CompleteBlockConjugateMean) {
  auto g = parse_edge_list("0 1\n0 2\n1 2\n0 3\n");
  auto h = Hyperparameters::uniform(4);
  auto s = state_for(g, {1, 1, 1, 2}, {});
  ASSERT_EQ(s.counts.M11, s.counts.m11);
  Rng rng = make_rng(4);
  const int draws = 20000;
  const double a = s.counts.m11 + 1.0;  // Beta(m11 + 1, 1)
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) {
    gibbs_update_probs(s, h, rng);
    sum += s.p.p11;
  }
  const double var = a / ((a + 1) * (a + 1) * (a + 2));
  EXPECT_NEAR(sum / draws, a / (a + 1), 3 * std::sqrt(var / draws));
  EXPECT_NEAR(s.log_lik, log_likelihood(s.counts, s.p), 1e-12);
}

TEST(GibbsUpdate, KarateFrozenLabelsMatchBetaMean) {
  auto g = load_dataset("karate");
  auto h = Hyperparameters::uniform(g.n());
  ChainConfig cfg;
  cfg.init = InitStrategy::degree_split;
  auto s = init_chain(g, h, cfg, 0);
  const auto k = s.counts;
  Rng rng = make_rng(10);
  const int draws = 10000;
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) {
    gibbs_update_probs(s, h, rng);
    sum += s.p.p11;
  }
  const double a = k.M11 + 1.0, b = k.m11 - k.M11 + 1.0;
  const double var = a * b / ((a + b) * (a + b) * (a + b + 1));
  EXPECT_NEAR(sum / draws, a / (a + b), 3 * std::sqrt(var / draws));
}

TEST(EnforceIdentifiability, SwapsWhenNeeded) {
  auto g = parse_edge_list("0 1\n1 2\n2 3\n3 0\n0 2\n");
  auto s = state_for(g, {1, 1, 2, 2}, {0.1, 0.3, 0.4});
  const auto before = s;
  enforce_identifiability(s);
  EXPECT_EQ(s.p, (BlockProbs{0.4, 0.3, 0.1}));
  EXPECT_EQ(s.c, (LabelVector{2, 2, 1, 1}));
  EXPECT_EQ(s.counts, block_counts(g, s.c));
  EXPECT_EQ(s.log_lik, before.log_lik);
  EXPECT_NEAR(log_likelihood(s.counts, s.p), before.log_lik, 1e-12);

  auto ordered = state_for(g, {1, 1, 2, 2}, {0.4, 0.3, 0.1});
  const auto copy = ordered;
  enforce_identifiability(ordered);
  EXPECT_EQ(ordered.c, copy.c);
  EXPECT_EQ(ordered.p, copy.p);
}

TEST(EnforceIdentifiability, PreservesLikelihoodOnRandomStates) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = oracle::random_graph(10, 0.3, gen);
    auto s = state_for(g, oracle::random_labels(10, gen), {unit(gen), unit(gen), unit(gen)});
    const double before = log_likelihood(s.counts, s.p);
    enforce_identifiability(s);
    EXPECT_GE(s.p.p11, s.p.p22);
    EXPECT_EQ(s.counts, block_counts(g, s.c));
    EXPECT_NEAR(log_likelihood(s.counts, s.p), before, 1e-10);
  }
}

TEST(RunChain, RetainedCounts) {
  auto g = parse_edge_list("0 1\n1 2\n2 3\n3 4\n4 0\n0 2\n");
  auto h = Hyperparameters::uniform(g.n());
  ChainConfig cfg;
  cfg.total_samples = 1500;
  cfg.burn_in = 500;
  EXPECT_EQ(run_chain(g, h, cfg).retained, 1000);
  cfg.total_samples = 15000;
  cfg.burn_in = 5000;
  auto s = run_chain(g, h, cfg);
  EXPECT_EQ(s.retained, 10000);
  EXPECT_EQ(s.swaps_proposed, 10000u * g.n());
  cfg.total_samples = 1000;
  cfg.burn_in = 100;
  cfg.thin = 7;
  auto thinned = run_chain(g, h, cfg);
  EXPECT_EQ(thinned.retained, 900 / 7);
  EXPECT_EQ(thinned.draws.size(), 128u);
}

TEST(RunChain, InvariantsOfRetainedDraws) {
  auto g = load_dataset("karate");
  auto h = Hyperparameters::uniform(g.n());
  ChainConfig cfg;
  cfg.total_samples = 2000;
  cfg.burn_in = 500;
  cfg.chains = 3;
  cfg.coassign = true;
  cfg.store_labels = true;
  auto s = run_chain(g, h, cfg);
  ASSERT_EQ(s.chains.size(), 3u);
  EXPECT_EQ(s.retained, 4500);
  for (const auto& p : s.draws) EXPECT_GE(p.p11, p.p22);
  for (auto t : s.label_tally) EXPECT_LE(t, static_cast<std::uint64_t>(s.retained));
  for (auto t : s.coassign_tally) EXPECT_LE(t, static_cast<std::uint64_t>(s.retained));
  std::uint64_t sizes = 0;
  for (auto t : s.size_tally) sizes += t;
  EXPECT_EQ(sizes, static_cast<std::uint64_t>(s.retained));
  EXPECT_EQ(s.label_draws.size(), 4500u);
  // pooled tallies are the chain sums
  for (std::size_t i = 0; i < g.n(); ++i)
    EXPECT_EQ(s.label_tally[i], s.chains[0].label_tally[i] + s.chains[1].label_tally[i] + s.chains[2].label_tally[i]);
  EXPECT_GT(s.swap_acceptance_rate(), 0.0);
  EXPECT_LT(s.swap_acceptance_rate(), 1.0);
}

TEST(RunChain, DeterministicAndThreadIndependent) {
  auto g = load_dataset("karate");
  auto h = Hyperparameters::uniform(g.n());
  ChainConfig cfg;
  cfg.total_samples = 600;
  cfg.burn_in = 100;
  cfg.chains = 3;
  cfg.seed = 42;
  auto a = run_chain(g, h, cfg);
  cfg.threads = 3;
  auto b = run_chain(g, h, cfg);
  ASSERT_EQ(a.draws.size(), b.draws.size());
  for (std::size_t t = 0; t < a.draws.size(); ++t) ASSERT_EQ(a.draws[t], b.draws[t]);
  EXPECT_EQ(a.label_tally, b.label_tally);
  EXPECT_EQ(a.log_lik, b.log_lik);
  cfg.seed = 43;
  auto c = run_chain(g, h, cfg);
  EXPECT_FALSE(c.draws.front() == a.draws.front());
}

TEST(IdentifiabilityWarning, FlagsAsymmetricPriors) {
  auto h = Hyperparameters::uniform(3);
  EXPECT_FALSE(identifiability_warning(h).has_value());
  h.block11 = {2.0, 1.0};
  EXPECT_TRUE(identifiability_warning(h).has_value());
  h = Hyperparameters::uniform(3, 1.0, 1.0, 0.3);
  EXPECT_TRUE(identifiability_warning(h).has_value());
}
