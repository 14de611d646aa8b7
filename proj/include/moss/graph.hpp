#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "moss/error.hpp"

namespace moss {

using NodeId = std::uint32_t;
using ExternalId = std::int64_t;

/// Immutable undirected simple graph in CSR form. Neighbor lists are sorted
/// by internal index; internal indices are dense in [0, node_count()).
class Graph {
 public:
  Graph() = default;

  /// Builds from internal-index edges. Self-loops and duplicates are dropped,
  /// direction is ignored. `external_ids` may be empty (identity mapping).
  static Graph from_edges(std::size_t node_count, std::vector<std::pair<NodeId, NodeId>> edges,
                          std::vector<ExternalId> external_ids = {}) {
    if (!external_ids.empty() && external_ids.size() != node_count)
      throw ConfigError("external id map size does not match node count");
    for (auto& [a, b] : edges) {
      if (a >= node_count || b >= node_count) throw ConfigError("edge endpoint out of range");
      if (a > b) std::swap(a, b);
    }
    std::erase_if(edges, [](const auto& e) { return e.first == e.second; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Graph g;
    g.offsets_.assign(node_count + 1, 0);
    for (const auto& [a, b] : edges) {
      ++g.offsets_[a + 1];
      ++g.offsets_[b + 1];
    }
    for (std::size_t v = 0; v < node_count; ++v) g.offsets_[v + 1] += g.offsets_[v];
    g.adjacency_.resize(2 * edges.size());
    std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [a, b] : edges) {
      g.adjacency_[cursor[a]++] = b;
      g.adjacency_[cursor[b]++] = a;
    }
    for (std::size_t v = 0; v < node_count; ++v)
      std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
                g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]));
    if (external_ids.empty()) {
      external_ids.resize(node_count);
      for (std::size_t v = 0; v < node_count; ++v) external_ids[v] = static_cast<ExternalId>(v);
    }
    g.external_ids_ = std::move(external_ids);
    g.edge_count_ = edges.size();
    for (std::size_t v = 0; v < node_count; ++v)
      g.max_degree_ = std::max<std::uint32_t>(g.max_degree_, g.degree(static_cast<NodeId>(v)));
    return g;
  }

  /// Builds from edges given in external IDs, numbering nodes densely in
  /// first-appearance order (same rule as the edge-list loader).
  static Graph from_external_edges(const std::vector<std::pair<ExternalId, ExternalId>>& edges) {
    std::unordered_map<ExternalId, NodeId> index;
    std::vector<ExternalId> external;
    auto intern = [&](ExternalId id) {
      auto [it, inserted] = index.try_emplace(id, static_cast<NodeId>(external.size()));
      if (inserted) external.push_back(id);
      return it->second;
    };
    std::vector<std::pair<NodeId, NodeId>> internal;
    internal.reserve(edges.size());
    for (const auto& [a, b] : edges) {
      const NodeId x = intern(a);
      const NodeId y = intern(b);
      internal.emplace_back(x, y);
    }
    const std::size_t n = external.size();
    return from_edges(n, std::move(internal), std::move(external));
  }

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::uint32_t max_degree() const noexcept { return max_degree_; }

  std::uint32_t degree(NodeId v) const {
    return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]);
  }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], degree(v)};
  }

  /// Offset of v's list inside the flat adjacency array; per-neighbor arrays
  /// built by other modules use the same layout.
  std::uint64_t offset(NodeId v) const { return offsets_[v]; }

  bool has_edge(NodeId u, NodeId v) const {
    if (degree(u) > degree(v)) std::swap(u, v);
    const auto nbrs = neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
  }

  /// Position of v inside u's neighbor list, or degree(u) when absent.
  std::uint32_t position(NodeId u, NodeId v) const {
    const auto nbrs = neighbors(u);
    const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
    if (it == nbrs.end() || *it != v) return degree(u);
    return static_cast<std::uint32_t>(it - nbrs.begin());
  }

  ExternalId external_id(NodeId v) const { return external_ids_[v]; }
  const std::vector<ExternalId>& external_ids() const noexcept { return external_ids_; }

  void check_node(NodeId v) const {
    if (v >= node_count())
      throw ConfigError("node index " + std::to_string(v) + " out of range [0, " +
                        std::to_string(node_count()) + ")");
  }

  /// Edges (u, v) with u < v in internal indices, lexicographically sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < node_count(); ++u)
      for (NodeId v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.adjacency_ == b.adjacency_ &&
           a.external_ids_ == b.external_ids_;
  }

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<ExternalId> external_ids_;
  std::size_t edge_count_ = 0;
  std::uint32_t max_degree_ = 0;
};

namespace detail {

inline bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

inline std::string_view next_token(std::string_view& rest) {
  std::size_t i = 0;
  while (i < rest.size() && is_blank(rest[i])) ++i;
  std::size_t j = i;
  while (j < rest.size() && !is_blank(rest[j])) ++j;
  const std::string_view tok = rest.substr(i, j - i);
  rest.remove_prefix(j);
  return tok;
}

inline ExternalId parse_id(std::string_view tok, std::size_t line) {
  ExternalId value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("expected an integer node id, got '" + std::string(tok) + "'", line);
  return value;
}

}  // namespace detail

/// Reads a SNAP-style edge list: '#' lines are comments, every other
/// non-blank line holds two integer IDs (further columns are ignored).
inline Graph load_edge_list(std::istream& in) {
  std::unordered_map<ExternalId, NodeId> index;
  std::vector<ExternalId> external;
  std::vector<std::pair<NodeId, NodeId>> edges;
  auto intern = [&](ExternalId id) {
    auto [it, inserted] = index.try_emplace(id, static_cast<NodeId>(external.size()));
    if (inserted) external.push_back(id);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    const auto first = rest.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || rest[first] == '#') continue;
    const auto a = detail::next_token(rest);
    const auto b = detail::next_token(rest);
    if (b.empty()) throw ParseError("expected two node ids", line_no);
    const ExternalId ea = detail::parse_id(a, line_no);
    const ExternalId eb = detail::parse_id(b, line_no);
    const NodeId x = intern(ea);
    const NodeId y = intern(eb);
    if (x != y) edges.emplace_back(x, y);
  }
  if (edges.empty()) throw ParseError("graph has no edges", 0);
  const std::size_t n = external.size();
  return Graph::from_edges(n, std::move(edges), std::move(external));
}

inline Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input file '" + path + "'");
  return load_edge_list(in);
}

/// Normalized form: one "u v" line per edge, internal indices, u < v, sorted.
inline void write_edge_list(const Graph& g, std::ostream& out) {
  out << "# nodes " << g.node_count() << " edges " << g.edge_count() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

/// FNV-1a over the normalized edge list.
inline std::uint64_t content_hash(const Graph& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(g.node_count());
  mix(g.edge_count());
  for (const auto& [u, v] : g.edges()) mix((std::uint64_t{u} << 32) | v);
  return h;
}

}  // namespace moss
