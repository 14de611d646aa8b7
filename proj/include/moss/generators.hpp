#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "moss/error.hpp"
#include "moss/graph.hpp"
#include "moss/random.hpp"

namespace moss {

using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

/// G(n, p): every pair independently.
inline Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (p < 0.0 || p > 1.0) throw ConfigError("edge probability must lie in [0, 1]");
  Rng rng = make_rng(seed, 0xe7);
  std::bernoulli_distribution coin(p);
  EdgeList edges;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b)
      if (coin(rng)) edges.emplace_back(a, b);
  return Graph::from_edges(n, std::move(edges));
}

/// Holme-Kim growth: each new node attaches `m` edges by preferential
/// attachment, and after each such edge closes a triangle with probability
/// `triad` by linking to a random neighbor of the node just chosen.
inline Graph holme_kim(std::size_t n, std::size_t m, double triad, std::uint64_t seed) {
  if (m == 0 || n <= m) throw ConfigError("holme_kim needs 0 < m < n");
  Rng rng = make_rng(seed, 0x4b);
  std::bernoulli_distribution close(triad);
  std::vector<std::vector<NodeId>> adj(n);
  std::vector<NodeId> ends;  // each node repeated once per incident edge
  EdgeList edges;
  auto link = [&](NodeId a, NodeId b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
    ends.push_back(a);
    ends.push_back(b);
    edges.emplace_back(a, b);
  };
  for (NodeId a = 0; a < m; ++a) link(a, static_cast<NodeId>(m));  // star seed on m + 1 nodes
  for (NodeId v = static_cast<NodeId>(m + 1); v < n; ++v) {
    std::vector<NodeId> chosen;
    auto fresh = [&](NodeId x) { return x != v && std::find(chosen.begin(), chosen.end(), x) == chosen.end(); };
    NodeId last = ends[uniform_below(rng, ends.size())];
    while (chosen.size() < m) {
      NodeId target = v;
      if (!chosen.empty() && close(rng)) {
        const auto& nb = adj[last];
        for (int tries = 0; tries < 8 && !fresh(target); ++tries) target = nb[uniform_below(rng, nb.size())];
      }
      while (!fresh(target)) target = ends[uniform_below(rng, ends.size())];
      chosen.push_back(target);
      last = target;
    }
    for (const NodeId t : chosen) link(v, t);
  }
  return Graph::from_edges(n, std::move(edges));
}

/// Co-authorship style graph: `papers` author teams, each a clique. Team
/// sizes are 1 + geometric(mean_extra); authors are picked with probability
/// growing in the number of papers they already have, plus `fresh_weight`.
inline Graph collaboration_graph(std::size_t authors, std::size_t papers, double mean_extra, double fresh_weight,
                                 std::uint64_t seed) {
  if (authors < 2) throw ConfigError("collaboration_graph needs at least two authors");
  Rng rng = make_rng(seed, 0xc0);
  std::geometric_distribution<int> extra(1.0 / (1.0 + mean_extra));
  std::vector<NodeId> slots;  // one entry per authorship
  std::vector<NodeId> unused(authors);
  for (NodeId a = 0; a < authors; ++a) unused[a] = a;
  std::shuffle(unused.begin(), unused.end(), rng);
  EdgeList edges;
  for (std::size_t p = 0; p < papers; ++p) {
    const std::size_t size = std::min<std::size_t>(1 + static_cast<std::size_t>(extra(rng)), 40);
    std::vector<NodeId> team;
    for (int guard = 0; team.size() < size && guard < 1000; ++guard) {
      const double w_new = unused.empty() ? 0.0 : fresh_weight;
      const double total = w_new + static_cast<double>(slots.size());
      NodeId a;
      if (total <= 0.0 || std::uniform_real_distribution<double>(0.0, total)(rng) < w_new) {
        a = unused.back();
        unused.pop_back();
      } else {
        a = slots[uniform_below(rng, slots.size())];
      }
      if (std::find(team.begin(), team.end(), a) == team.end()) team.push_back(a);
    }
    for (std::size_t i = 0; i < team.size(); ++i) {
      slots.push_back(team[i]);
      for (std::size_t j = i + 1; j < team.size(); ++j) edges.emplace_back(team[i], team[j]);
    }
  }
  return Graph::from_edges(authors, std::move(edges));
}

/// Desk-scale stand-in for the GR-QC collaboration network (5242 nodes, about 19k
/// edges, 4e7 five-node CISes) used when the real edge list is not present.
inline Graph grqc_surrogate(std::uint64_t seed = 2024) {
  return collaboration_graph(5242, 3000, 2.0, 10000.0, seed);
}

}  // namespace moss
