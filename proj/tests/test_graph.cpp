#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "support.hpp"

using namespace moss_test;

namespace {

Graph parse(const std::string& text) {
  std::istringstream in(text);
  return moss::load_edge_list(in);
}

void expect_simple_and_sorted(const Graph& g) {
  std::uint64_t degree_sum = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto nb = g.neighbors(v);
    degree_sum += nb.size();
    EXPECT_TRUE(std::adjacent_find(nb.begin(), nb.end(), std::greater_equal<>()) == nb.end());
    for (const NodeId x : nb) {
      EXPECT_NE(x, v);
      EXPECT_TRUE(g.has_edge(x, v));
    }
  }
  EXPECT_EQ(degree_sum, 2 * g.edge_count());
}

}  // namespace

TEST(EdgeList, CommentsDuplicatesAndDirectionCollapse) {
  const Graph g = parse("# c\n1 2\n2 1\n2 3\n");
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.external_id(0), 1u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(1, 2));
  EXPECT_FALSE(g.has_edge(0, 2));
}

TEST(EdgeList, SelfLoopDropped) {
  const Graph g = parse("1 1\n1 2\n");
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(EdgeList, ExtraColumnsAndBlankLinesIgnored) {
  const Graph g = parse("\n10 20 0.5\n\t20 30 x\n");
  EXPECT_EQ(g.edge_count(), 2u);
}

TEST(EdgeList, MalformedLineReportsItsNumber) {
  try {
    parse("1 2\n# ok\n3 x\n");
    FAIL() << "expected a parse error";
  } catch (const moss::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse("1\n"), moss::ParseError);
  EXPECT_THROW(parse("# nothing\n"), moss::ParseError);
}

TEST(EdgeList, MissingFileIsAConfigError) {
  EXPECT_THROW(moss::load_edge_list_file("/nonexistent/graph.txt"), moss::ConfigError);
}

TEST(EdgeList, NormalizedRoundTripKeepsHash) {
  const Graph g = moss::erdos_renyi(30, 0.2, 4);
  std::ostringstream out;
  moss::write_edge_list(g, out);
  const Graph h = parse(out.str());
  EXPECT_EQ(h.edge_count(), g.edge_count());
  expect_simple_and_sorted(h);
  EXPECT_EQ(moss::content_hash(g), moss::content_hash(moss::erdos_renyi(30, 0.2, 4)));
  EXPECT_NE(moss::content_hash(g), moss::content_hash(moss::erdos_renyi(30, 0.2, 5)));
}

TEST(Graph, RandomGraphsAreSimple) {
  for (std::uint64_t s = 0; s < 5; ++s) expect_simple_and_sorted(moss::erdos_renyi(40, 0.3, s));
  expect_simple_and_sorted(moss::holme_kim(300, 3, 0.5, 1));
  expect_simple_and_sorted(moss::collaboration_graph(200, 150, 2.0, 50.0, 1));
}

TEST(Graph, PositionAndCheckNode) {
  const Graph g = star_graph(3);
  EXPECT_EQ(g.position(0, 2), 1u);
  EXPECT_EQ(g.position(1, 2), g.degree(1));
  EXPECT_THROW(g.check_node(4), moss::ConfigError);
}

TEST(TotalOrder, IsAPermutationConsistentWithDegreeThenIndex) {
  const Graph g = moss::holme_kim(200, 2, 0.3, 3);
  const moss::TotalOrder o(g);
  std::vector<std::uint32_t> ranks = o.ranks();
  std::sort(ranks.begin(), ranks.end());
  for (std::uint32_t i = 0; i < ranks.size(); ++i) ASSERT_EQ(ranks[i], i);
  for (NodeId a = 0; a < g.node_count(); ++a)
    for (NodeId b = 0; b < g.node_count(); ++b) {
      if (a == b) continue;
      const bool expected = g.degree(a) != g.degree(b) ? g.degree(a) > g.degree(b) : a > b;
      ASSERT_EQ(o.above(a, b), expected);
    }
}

TEST(TotalOrder, StarCenterIsAboveLeaves) {
  const Graph g = star_graph(3);
  const moss::TotalOrder o(g);
  for (NodeId leaf = 1; leaf <= 3; ++leaf) EXPECT_TRUE(o.above(0, leaf));
}

TEST(TotalOrder, EqualDegreeTieGoesToLargerIndex) {
  const Graph g = make_graph(6, {{2, 0}, {5, 1}});
  const moss::TotalOrder o(g);
  EXPECT_TRUE(o.above(5, 2));
}

TEST(TotalOrder, PathMiddleIsTop) {
  const Graph g = path_graph(3);
  const moss::TotalOrder o(g);
  EXPECT_TRUE(o.above(1, 0));
  EXPECT_TRUE(o.above(1, 2));
  EXPECT_TRUE(o.above(2, 0));
}

TEST(RestrictedNeighbors, K4Examples) {
  const Graph g = complete_graph(4);  // nodes 0..3 stand for 1..4
  const moss::TotalOrder o(g);
  const auto n12 = moss::restricted_neighbors(g, o, 0, 1);
  EXPECT_EQ(std::vector<NodeId>(n12.begin(), n12.end()), (std::vector<NodeId>{2, 3}));
  EXPECT_EQ(o.count_above_in(1, 2), 1u);
  EXPECT_EQ(o.above_in(1, 2)[0], 3u);
}

TEST(RestrictedNeighbors, LeafBelowCenterIsEmpty) {
  const Graph g = star_graph(3);
  const moss::TotalOrder o(g);
  EXPECT_TRUE(moss::restricted_neighbors(g, o, 1, 0).empty());
  EXPECT_THROW(moss::restricted_neighbors(g, o, 9, 0), moss::ConfigError);
}
