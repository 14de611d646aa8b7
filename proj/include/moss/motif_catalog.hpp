#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "moss/error.hpp"
#include "moss/small_graph.hpp"

namespace moss {

inline constexpr int kNotConnected = 0;
inline constexpr int kMotifs4 = 6;
inline constexpr int kMotifs5 = 21;

/// Non-induced patterns whose copies define the coefficient tables.
enum class Pattern {
  kPath4,     // 4-node path (3 edges)
  kStar3,     // 3-star
  kPath5,     // 5-node path (4 edges)
  kForkTree,  // 3-star with one edge subdivided, degrees (1,1,1,2,3)
  kStar4,     // 4-star
};

inline SmallGraph pattern_graph(Pattern p) {
  switch (p) {
    case Pattern::kPath4: return SmallGraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
    case Pattern::kStar3: return SmallGraph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
    case Pattern::kPath5: return SmallGraph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    case Pattern::kForkTree: return SmallGraph::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {3, 4}});
    case Pattern::kStar4: return SmallGraph::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  }
  throw ConfigError("unsupported pattern");
}

namespace detail {

/// Number of injective maps pattern -> host that send every pattern edge to a
/// host edge.
inline std::uint64_t count_embeddings(const SmallGraph& host, const SmallGraph& pattern) {
  const int k = pattern.n;
  std::array<int, 5> image{};
  std::uint64_t count = 0;
  auto rec = [&](auto&& self, int depth, unsigned used) -> void {
    if (depth == k) {
      ++count;
      return;
    }
    for (int h = 0; h < host.n; ++h) {
      if (used >> h & 1U) continue;
      bool ok = true;
      for (int j = 0; j < depth && ok; ++j)
        if (pattern.has_edge(depth, j) && !host.has_edge(h, image[j])) ok = false;
      if (!ok) continue;
      image[depth] = h;
      self(self, depth + 1, used | (1U << h));
    }
  };
  rec(rec, 0, 0U);
  return count;
}

}  // namespace detail

/// Exact count of (not necessarily induced) subgraphs of `host` isomorphic
/// to `pattern`: edge-preserving injections divided by the pattern's
/// automorphism count.
inline std::uint64_t count_pattern_subgraphs(const SmallGraph& host, Pattern pattern) {
  const SmallGraph p = pattern_graph(pattern);
  if (host.n > 5) throw ConfigError("host graph must have at most five nodes");
  return detail::count_embeddings(host, p) / detail::count_embeddings(p, p);
}

/// Published coefficient values. 4-node: (copies of the 4-path, copies of the
/// 3-star) for motifs 1..6. 5-node: (fork trees, 5-paths, 4-stars) for 1..21.
inline constexpr std::array<std::array<int, 2>, kMotifs4> kPhi4Table = {{
    {1, 0}, {0, 1}, {4, 0}, {2, 1}, {6, 2}, {12, 4},
}};

inline constexpr std::array<std::array<int, 3>, kMotifs5> kPhi5Table = {{
    {0, 1, 0},   {0, 0, 1},   {1, 0, 0},   {1, 2, 0},   {2, 2, 0},   {0, 5, 0},   {2, 1, 0},
    {2, 0, 1},   {4, 4, 0},   {4, 7, 0},   {5, 2, 1},   {4, 4, 1},   {6, 6, 0},   {10, 10, 1},
    {9, 6, 1},   {12, 6, 2},  {10, 14, 0}, {20, 24, 1}, {20, 18, 2}, {36, 36, 3}, {60, 60, 5},
}};

struct Motif {
  int id = 0;
  SmallGraph shape;
  int edges = 0;
  std::array<int, 5> degrees{};  // ascending; unused tail is zero for 4-node motifs
  int triangles = 0;
  std::array<int, 3> phi{};      // 4-node: (phi1, phi2, -); 5-node: (phi1, phi2, phi3)
};

/// Motif classes on 4 and 5 nodes, numbered by matching recomputed
/// coefficient tuples against the published tables.
class MotifCatalog {
 public:
  using Key = std::tuple<int, std::array<int, 5>, int>;

  static Key key_of(const SmallGraph& g) {
    std::array<int, 5> deg{};
    for (int i = 0; i < g.n; ++i) deg[i] = g.degree(i);
    std::sort(deg.begin(), deg.begin() + g.n);
    return {g.edge_count(), deg, g.triangle_count()};
  }

  const Motif& motif4(int id) const { return motifs4_.at(static_cast<std::size_t>(id - 1)); }
  const Motif& motif5(int id) const { return motifs5_.at(static_cast<std::size_t>(id - 1)); }
  const std::vector<Motif>& motifs4() const { return motifs4_; }
  const std::vector<Motif>& motifs5() const { return motifs5_; }

  /// Class of a 4-node graph given as per-node adjacency rows, or kNotConnected.
  int classify4(const SmallGraph& g) const { return lut4_[g.pair_mask()]; }
  int classify5(const SmallGraph& g) const { return lut5_[g.pair_mask()]; }
  int classify4_mask(std::uint32_t pair_mask) const { return lut4_[pair_mask]; }
  int classify5_mask(std::uint32_t pair_mask) const { return lut5_[pair_mask]; }

  /// Key lookup without the table; used to build the tables and in tests.
  int classify_by_key(const SmallGraph& g) const {
    if (!g.connected()) return kNotConnected;
    const auto& keys = g.n == 4 ? keys4_ : keys5_;
    const auto it = keys.find(key_of(g));
    return it == keys.end() ? kNotConnected : it->second;
  }

  int phi4(int which, int id) const { return motif4(id).phi[static_cast<std::size_t>(which - 1)]; }
  int phi5(int which, int id) const { return motif5(id).phi[static_cast<std::size_t>(which - 1)]; }

  /// {j : phi_j^(which) > 0} over 5-node motifs, ascending.
  std::vector<int> omega(int which) const {
    std::vector<int> out;
    for (const auto& m : motifs5_)
      if (m.phi[static_cast<std::size_t>(which - 1)] > 0) out.push_back(m.id);
    return out;
  }
  /// Omega_3 without motif 2 (the 4-star itself).
  std::vector<int> omega3_star() const {
    auto o = omega(3);
    std::erase(o, 2);
    return o;
  }

  friend MotifCatalog build_catalog();

 private:
  std::vector<Motif> motifs4_;
  std::vector<Motif> motifs5_;
  std::map<Key, int> keys4_;
  std::map<Key, int> keys5_;
  std::array<std::uint8_t, 64> lut4_{};
  std::array<std::uint8_t, 1024> lut5_{};
};

namespace detail {

inline std::vector<SmallGraph> connected_classes(int n) {
  const int pairs = n * (n - 1) / 2;
  std::map<std::uint32_t, SmallGraph> classes;
  for (std::uint32_t mask = 0; mask < (1U << pairs); ++mask) {
    const SmallGraph g = SmallGraph::from_pair_mask(n, mask);
    if (!g.connected()) continue;
    const std::uint32_t canon = g.canonical_mask();
    classes.try_emplace(canon, SmallGraph::from_pair_mask(n, canon));
  }
  std::vector<SmallGraph> out;
  for (auto& [canon, g] : classes) out.push_back(g);
  return out;
}

}  // namespace detail

/// Enumerates every connected graph on 4 and 5 nodes, recomputes the
/// coefficient tuples by brute-force pattern counting, and assigns IDs by
/// matching the published tables. Throws if any tuple is unmatched or
/// ambiguous, or if the (edges, degrees, triangles) key collides.
inline MotifCatalog build_catalog() {
  MotifCatalog cat;
  auto finish = [](Motif& m, const SmallGraph& g) {
    m.shape = g;
    m.edges = g.edge_count();
    const auto key = MotifCatalog::key_of(g);
    m.degrees = std::get<1>(key);
    m.triangles = std::get<2>(key);
  };

  const auto classes4 = detail::connected_classes(4);
  if (classes4.size() != kMotifs4) throw Error("expected 6 connected 4-node classes");
  cat.motifs4_.resize(kMotifs4);
  std::vector<bool> seen4(kMotifs4, false);
  for (const auto& g : classes4) {
    const int a = static_cast<int>(count_pattern_subgraphs(g, Pattern::kPath4));
    const int b = static_cast<int>(count_pattern_subgraphs(g, Pattern::kStar3));
    const auto it = std::find(kPhi4Table.begin(), kPhi4Table.end(), std::array<int, 2>{a, b});
    if (it == kPhi4Table.end())
      throw Error("4-node class with coefficients (" + std::to_string(a) + "," + std::to_string(b) +
                  ") matches no table entry");
    const auto idx = static_cast<std::size_t>(it - kPhi4Table.begin());
    if (seen4[idx]) throw Error("two 4-node classes match the same table entry");
    seen4[idx] = true;
    Motif& m = cat.motifs4_[idx];
    m.id = static_cast<int>(idx) + 1;
    m.phi = {a, b, 0};
    finish(m, g);
  }

  const auto classes5 = detail::connected_classes(5);
  if (classes5.size() != kMotifs5) throw Error("expected 21 connected 5-node classes");
  cat.motifs5_.resize(kMotifs5);
  std::vector<bool> seen5(kMotifs5, false);
  for (const auto& g : classes5) {
    const std::array<int, 3> phi = {static_cast<int>(count_pattern_subgraphs(g, Pattern::kForkTree)),
                                    static_cast<int>(count_pattern_subgraphs(g, Pattern::kPath5)),
                                    static_cast<int>(count_pattern_subgraphs(g, Pattern::kStar4))};
    const auto it = std::find(kPhi5Table.begin(), kPhi5Table.end(), phi);
    if (it == kPhi5Table.end())
      throw Error("5-node class with coefficients (" + std::to_string(phi[0]) + "," + std::to_string(phi[1]) +
                  "," + std::to_string(phi[2]) + ") matches no table entry");
    const auto idx = static_cast<std::size_t>(it - kPhi5Table.begin());
    if (seen5[idx]) throw Error("two 5-node classes match the same table entry");
    seen5[idx] = true;
    Motif& m = cat.motifs5_[idx];
    m.id = static_cast<int>(idx) + 1;
    m.phi = phi;
    finish(m, g);
  }

  for (const auto& m : cat.motifs4_)
    if (!cat.keys4_.emplace(MotifCatalog::key_of(m.shape), m.id).second)
      throw Error("4-node classification key collision");
  for (const auto& m : cat.motifs5_)
    if (!cat.keys5_.emplace(MotifCatalog::key_of(m.shape), m.id).second)
      throw Error("5-node classification key collision");

  for (std::uint32_t mask = 0; mask < 64; ++mask)
    cat.lut4_[mask] = static_cast<std::uint8_t>(cat.classify_by_key(SmallGraph::from_pair_mask(4, mask)));
  for (std::uint32_t mask = 0; mask < 1024; ++mask)
    cat.lut5_[mask] = static_cast<std::uint8_t>(cat.classify_by_key(SmallGraph::from_pair_mask(5, mask)));
  return cat;
}

/// Process-wide catalog, built on first use.
inline const MotifCatalog& catalog() {
  static const MotifCatalog instance = build_catalog();
  return instance;
}

}  // namespace moss
