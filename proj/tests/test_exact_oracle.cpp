#include <gtest/gtest.h>

#include "support.hpp"

using namespace moss_test;

namespace {

// Brute-force non-induced pattern counts over node subsets, for tiny graphs.
moss::PatternCounts brute_patterns(const Graph& g) {
  moss::PatternCounts pc;
  const std::size_t n = g.node_count();
  std::array<NodeId, 5> pick{};
  auto rec = [&](auto&& self, int k, int depth, NodeId from) -> void {
    if (depth == k) {
      const auto s = moss::induced_subgraph(g, std::span<const NodeId>(pick.data(), static_cast<std::size_t>(k)));
      if (k == 3) pc.triangles += s.edge_count() == 3;
      if (k == 4) {
        pc.paths4 += moss::count_pattern_subgraphs(s, moss::Pattern::kPath4);
        pc.stars3 += moss::count_pattern_subgraphs(s, moss::Pattern::kStar3);
      }
      if (k == 5) {
        pc.paths5 += moss::count_pattern_subgraphs(s, moss::Pattern::kPath5);
        pc.forks += moss::count_pattern_subgraphs(s, moss::Pattern::kForkTree);
        pc.stars4 += moss::count_pattern_subgraphs(s, moss::Pattern::kStar4);
      }
      return;
    }
    for (NodeId x = from; x < n; ++x) {
      pick[static_cast<std::size_t>(depth)] = x;
      self(self, k, depth + 1, x + 1);
    }
  };
  for (const int k : {3, 4, 5}) rec(rec, k, 0, 0);
  return pc;
}

void expect_star_identities(const moss::ExactCounts& c, const moss::WeightIndex& index) {
  const auto& cat = moss::catalog();
  EXPECT_EQ(index.lambda3(), c.n[2] + c.n[4] + 2 * c.n[5] + 4 * c.n[6]);
  std::uint64_t l4 = 0;
  for (int id = 1; id <= 21; ++id) l4 += static_cast<std::uint64_t>(cat.phi5(3, id)) * c.eta[static_cast<std::size_t>(id)];
  EXPECT_EQ(index.lambda4(), l4);
}

}  // namespace

TEST(Oracle, CompleteGraphs) {
  const auto k5 = moss::enumerate_cis(complete_graph(5), 5);
  EXPECT_EQ(k5.eta[21], 1u);
  EXPECT_EQ(k5.total5(), 1u);
  const auto k4 = moss::enumerate_cis(make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}), 4);
  EXPECT_EQ(k4.n[6], 1u);
  EXPECT_EQ(k4.total4(), 1u);
  EXPECT_FALSE(k4.has5);
}

TEST(Oracle, EsuAgreesWithAllSubsetsOnRandomGraphs) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Graph g = moss::erdos_renyi(9, 0.5, s);
    for (const int k : {4, 5}) {
      EXPECT_EQ(moss::enumerate_cis_counts(g, k), moss::naive_cis_counts(g, k)) << s << ' ' << k;
      EXPECT_EQ(moss::enumerate_cis_counts(g, k, 3), moss::naive_cis_counts(g, k));
    }
  }
  const Graph sparse = moss::holme_kim(28, 2, 0.4, 1);
  EXPECT_EQ(moss::enumerate_cis_counts(sparse, 5), moss::naive_cis_counts(sparse, 5));
}

TEST(Oracle, PatternCountsAgreeWithBruteForce) {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const Graph g = moss::erdos_renyi(11, 0.45, s);
    EXPECT_EQ(moss::count_noninduced_patterns(g), brute_patterns(g)) << s;
  }
  for (const auto& [name, g] : small_graph_suite()) EXPECT_EQ(moss::count_noninduced_patterns(g), brute_patterns(g)) << name;
}

TEST(Oracle, PatternExamples) {
  const auto k4 = moss::count_noninduced_patterns(complete_graph(4));
  EXPECT_EQ(k4.paths4, 12u);
  EXPECT_EQ(k4.triangles, 4u);
  EXPECT_EQ(moss::count_noninduced_patterns(cycle_graph(4)).paths4, 4u);
}

TEST(Oracle, StarIdentitiesHold) {
  for (const auto& [name, g] : small_graph_suite()) {
    const Indexed ix(g);
    expect_star_identities(moss::enumerate_cis(ix.graph, 0), ix.index);
  }
  const Indexed hk(moss::holme_kim(300, 3, 0.6, 2));
  const auto c = moss::enumerate_cis(hk.graph, 0);
  expect_star_identities(c, hk.index);
  EXPECT_EQ(hk.index.lambda3(), c.patterns.stars3);
}

TEST(Oracle, PatternCountsAreWeightedMotifSums) {
  const auto& cat = moss::catalog();
  const Graph g = moss::holme_kim(200, 3, 0.5, 4);
  const auto c = moss::enumerate_cis(g, 0);
  std::uint64_t p4 = 0, s3 = 0, forks = 0, p5 = 0, s4 = 0;
  for (int id = 1; id <= 6; ++id) {
    p4 += static_cast<std::uint64_t>(cat.phi4(1, id)) * c.n[static_cast<std::size_t>(id)];
    s3 += static_cast<std::uint64_t>(cat.phi4(2, id)) * c.n[static_cast<std::size_t>(id)];
  }
  for (int id = 1; id <= 21; ++id) {
    const auto a = static_cast<std::size_t>(id);
    forks += static_cast<std::uint64_t>(cat.phi5(1, id)) * c.eta[a];
    p5 += static_cast<std::uint64_t>(cat.phi5(2, id)) * c.eta[a];
    s4 += static_cast<std::uint64_t>(cat.phi5(3, id)) * c.eta[a];
  }
  EXPECT_EQ(p4, c.patterns.paths4);
  EXPECT_EQ(s3, c.patterns.stars3);
  EXPECT_EQ(forks, c.patterns.forks);
  EXPECT_EQ(p5, c.patterns.paths5);
  EXPECT_EQ(s4, c.patterns.stars4);
}

TEST(Oracle, RefusesAboveCap) {
  moss::OracleOptions opt;
  opt.cap = 10;
  EXPECT_THROW(moss::enumerate_cis(moss::erdos_renyi(40, 0.3, 1), 5, opt), moss::ScaleCapError);
  opt.cap = 0;
  try {
    moss::enumerate_cis(complete_graph(5), 5, opt);
    FAIL();
  } catch (const moss::ScaleCapError& e) {
    EXPECT_NEAR(e.projected(), 1.0, 0.05);  // sampled projection of the single CIS
  }
}

TEST(Oracle, ProjectionIsCloseOnMidSizeGraph) {
  const Indexed ix(moss::holme_kim(400, 3, 0.5, 6));
  moss::OracleOptions opt;
  opt.cap = 10;  // force the sampled projection
  const double proj4 = moss::project_cis_count(ix.index, 4, opt);
  const double proj5 = moss::project_cis_count(ix.index, 5, opt);
  const auto c = moss::enumerate_cis(ix.graph, 0);
  EXPECT_NEAR(proj4 / static_cast<double>(c.total4()), 1.0, 0.1);
  EXPECT_NEAR(proj5 / static_cast<double>(c.total5()), 1.0, 0.15);
}
