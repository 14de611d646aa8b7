#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace moss {

/// Graph on at most five labelled nodes, stored as one adjacency bitmask per
/// node (bit j of rows[i] set iff i ~ j).
struct SmallGraph {
  int n = 0;
  std::array<std::uint8_t, 5> rows{};

  static SmallGraph from_edges(int n, std::initializer_list<std::pair<int, int>> edges) {
    SmallGraph g;
    g.n = n;
    for (const auto& [a, b] : edges) g.add_edge(a, b);
    return g;
  }

  /// Decodes a pair mask: bit k corresponds to the k-th pair (i, j), i < j, in
  /// row-major order.
  static SmallGraph from_pair_mask(int n, std::uint32_t mask) {
    SmallGraph g;
    g.n = n;
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++k)
        if (mask >> k & 1U) g.add_edge(i, j);
    return g;
  }

  std::uint32_t pair_mask() const {
    std::uint32_t mask = 0;
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++k)
        if (has_edge(i, j)) mask |= 1U << k;
    return mask;
  }

  void add_edge(int a, int b) {
    rows[a] = static_cast<std::uint8_t>(rows[a] | (1U << b));
    rows[b] = static_cast<std::uint8_t>(rows[b] | (1U << a));
  }

  bool has_edge(int a, int b) const { return (rows[a] >> b) & 1U; }
  int degree(int a) const { return std::popcount(static_cast<unsigned>(rows[a])); }

  int edge_count() const {
    int s = 0;
    for (int i = 0; i < n; ++i) s += degree(i);
    return s / 2;
  }

  int triangle_count() const {
    int t = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (has_edge(i, j)) t += std::popcount(static_cast<unsigned>(rows[i] & rows[j] & ~((2U << j) - 1)));
    return t;
  }

  bool connected() const {
    if (n == 0) return false;
    unsigned seen = 1, frontier = 1;
    while (frontier) {
      unsigned next = 0;
      for (int i = 0; i < n; ++i)
        if (frontier >> i & 1U) next |= rows[i];
      frontier = next & ~seen;
      seen |= next;
    }
    return seen == (1U << n) - 1;
  }

  /// Relabels node i as perm[i].
  SmallGraph permuted(const std::array<int, 5>& perm) const {
    SmallGraph g;
    g.n = n;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (has_edge(i, j)) g.add_edge(perm[i], perm[j]);
    return g;
  }

  /// Smallest pair mask over all relabelings; equal iff isomorphic.
  std::uint32_t canonical_mask() const {
    std::array<int, 5> perm{0, 1, 2, 3, 4};
    std::uint32_t best = ~0U;
    do {
      best = std::min(best, permuted(perm).pair_mask());
    } while (std::next_permutation(perm.begin(), perm.begin() + n));
    return best;
  }

  std::vector<std::pair<int, int>> edge_list() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (has_edge(i, j)) out.emplace_back(i, j);
    return out;
  }

  friend bool operator==(const SmallGraph&, const SmallGraph&) = default;
};

}  // namespace moss
