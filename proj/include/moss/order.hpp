#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "moss/graph.hpp"

namespace moss {

/// Strict total order on nodes: u > v iff d_u > d_v, or d_u == d_v and u has
/// the larger internal index. Also keeps every neighbor list re-sorted by
/// rank, so the neighbors of u ranked above v form a suffix of that list.
class TotalOrder {
 public:
  TotalOrder() = default;

  explicit TotalOrder(const Graph& g) : rank_(g.node_count()) {
    const std::size_t n = g.node_count();
    std::vector<NodeId> by_rank(n);
    std::iota(by_rank.begin(), by_rank.end(), NodeId{0});
    std::sort(by_rank.begin(), by_rank.end(), [&g](NodeId a, NodeId b) {
      const auto da = g.degree(a), db = g.degree(b);
      return da != db ? da < db : a < b;
    });
    for (std::size_t i = 0; i < n; ++i) rank_[by_rank[i]] = static_cast<std::uint32_t>(i);

    offsets_.resize(n + 1);
    ranked_.resize(2 * g.edge_count());
    for (NodeId v = 0; v < n; ++v) {
      offsets_[v] = g.offset(v);
      const auto nbrs = g.neighbors(v);
      auto out = ranked_.begin() + static_cast<std::ptrdiff_t>(g.offset(v));
      std::copy(nbrs.begin(), nbrs.end(), out);
      std::sort(out, out + static_cast<std::ptrdiff_t>(nbrs.size()),
                [this](NodeId a, NodeId b) { return rank_[a] < rank_[b]; });
    }
    offsets_[n] = ranked_.size();
  }

  std::uint32_t rank(NodeId v) const { return rank_[v]; }
  const std::vector<std::uint32_t>& ranks() const noexcept { return rank_; }

  /// u > v in the order.
  bool above(NodeId u, NodeId v) const { return rank_[u] > rank_[v]; }

  /// Neighbors of u sorted by ascending rank.
  std::span<const NodeId> ranked_neighbors(NodeId u) const {
    return {ranked_.data() + offsets_[u], static_cast<std::size_t>(offsets_[u + 1] - offsets_[u])};
  }

  /// N_{u,v}: neighbors of u ranked above v (v need not be adjacent to u).
  std::span<const NodeId> above_in(NodeId u, NodeId v) const {
    const auto list = ranked_neighbors(u);
    const auto cut = std::upper_bound(list.begin(), list.end(), rank_[v],
                                      [this](std::uint32_t r, NodeId x) { return r < rank_[x]; });
    return list.subspan(static_cast<std::size_t>(cut - list.begin()));
  }

  /// d_{u,v} = |N_{u,v}|.
  std::uint32_t count_above_in(NodeId u, NodeId v) const {
    return static_cast<std::uint32_t>(above_in(u, v).size());
  }

 private:
  std::vector<std::uint32_t> rank_;
  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> ranked_;
};

/// Order-restricted neighbor set N_{u,v}, validating both indices.
inline std::span<const NodeId> restricted_neighbors(const Graph& g, const TotalOrder& order, NodeId u,
                                                    NodeId v) {
  g.check_node(u);
  g.check_node(v);
  return order.above_in(u, v);
}

}  // namespace moss
