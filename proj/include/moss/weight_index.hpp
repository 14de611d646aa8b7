#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "moss/error.hpp"
#include "moss/graph.hpp"
#include "moss/order.hpp"
#include "moss/random.hpp"

namespace moss {

/// Root distributions over nodes.
enum class RootWeight : int {
  kGamma = 0,       // (d_v-1) * sum_{x in N_v} (d_x-1)                 MOSS-4
  kGammaCheck = 1,  // sum_{x in N_v} d_{v,x} d_{x,v}                   MOSS-4Min
  kGamma1 = 2,      // (d_v-1)(d_v-2) * sum_{x in N_v} (d_x-1)           T-5
  kGamma2 = 3,      // (sum (d_x-1))^2 - sum (d_x-1)^2                   Path-5
};

inline const char* to_string(RootWeight w) {
  switch (w) {
    case RootWeight::kGamma: return "Gamma";
    case RootWeight::kGammaCheck: return "GammaCheck";
    case RootWeight::kGamma1: return "Gamma1";
    case RootWeight::kGamma2: return "Gamma2";
  }
  return "?";
}

/// A sampled neighbor: its node index and its position in the owner's
/// (index-sorted) neighbor list.
struct NeighborPick {
  NodeId node;
  std::uint32_t pos;
};

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b, const char* what) {
  std::uint64_t out;
  if (__builtin_add_overflow(a, b, &out))
    throw OverflowError(std::string("64-bit overflow while accumulating ") + what);
  return out;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
  std::uint64_t out;
  if (__builtin_mul_overflow(a, b, &out))
    throw OverflowError(std::string("64-bit overflow while computing ") + what);
  return out;
}

inline std::uint64_t choose(std::uint64_t n, std::uint64_t k, const char* what) {
  if (n < k) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = checked_mul(r, n - k + i, what) / i;
  return r;
}

/// First index i with acc[i] >= rnd; acc is non-decreasing and rnd in [1, acc.back()].
inline std::size_t search_cumulative(std::span<const std::uint64_t> acc, std::uint64_t rnd) {
  return static_cast<std::size_t>(std::lower_bound(acc.begin(), acc.end(), rnd) - acc.begin());
}

}  // namespace detail

/// Per-node sampling weights, their global sums, and the cumulative arrays
/// used for O(log) weighted draws. All weights are exact 64-bit integers.
///
/// Holds non-owning pointers to the graph and order it was built from; both
/// must outlive the index.
class WeightIndex {
 public:
  WeightIndex() = default;

  WeightIndex(const Graph& g, const TotalOrder& order) : graph_(&g), order_(&order) {
    const std::size_t n = g.node_count();
    for (auto& w : node_weight_) w.assign(n, 0);
    sigma_total_.assign(n, 0);
    sigma_max_.assign(n, 0);
    acc_sigma_.assign(2 * g.edge_count(), 0);
    acc_sigma_check_.assign(2 * g.edge_count(), 0);

    for (NodeId v = 0; v < n; ++v) {
      const std::uint64_t dv = g.degree(v);
      std::uint64_t s = 0, sq = 0, smax = 0, check = 0;
      const auto nbrs = g.neighbors(v);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const NodeId x = nbrs[i];
        const std::uint64_t a = g.degree(x) - 1;
        s = detail::checked_add(s, a, "sum of (d_x-1)");
        sq = detail::checked_add(sq, detail::checked_mul(a, a, "(d_x-1)^2"), "sum of (d_x-1)^2");
        smax = std::max(smax, a);
        acc_sigma_[g.offset(v) + i] = s;
        const std::uint64_t pair = detail::checked_mul(order.count_above_in(v, x),
                                                       order.count_above_in(x, v), "d_{v,x} d_{x,v}");
        check = detail::checked_add(check, pair, "GammaCheck_v");
        acc_sigma_check_[g.offset(v) + i] = check;
      }
      sigma_total_[v] = s;
      sigma_max_[v] = smax;
      const std::uint64_t dm1 = dv == 0 ? 0 : dv - 1;
      const std::uint64_t dm2 = dv < 2 ? 0 : dv - 2;
      node_weight_[0][v] = detail::checked_mul(dm1, s, "Gamma_v");
      node_weight_[1][v] = check;
      node_weight_[2][v] = detail::checked_mul(detail::checked_mul(dm1, dm2, "Gamma1_v"), s, "Gamma1_v");
      node_weight_[3][v] = detail::checked_mul(s, s, "Gamma2_v") - sq;
    }
    build_global_cumulatives();
  }

  const Graph& graph() const { return *graph_; }
  const TotalOrder& order() const { return *order_; }

  std::uint64_t weight(RootWeight which, NodeId v) const { return node_weight_[idx(which)][v]; }
  std::uint64_t total(RootWeight which) const { return totals_[idx(which)]; }
  std::span<const std::uint64_t> cumulative(RootWeight which) const { return acc_[idx(which)]; }

  std::uint64_t gamma() const { return total(RootWeight::kGamma); }
  std::uint64_t gamma_check() const { return total(RootWeight::kGammaCheck); }
  std::uint64_t gamma1() const { return total(RootWeight::kGamma1); }
  std::uint64_t gamma2() const { return total(RootWeight::kGamma2); }
  std::uint64_t lambda3() const { return lambda3_; }
  std::uint64_t lambda4() const { return lambda4_; }

  /// sum_{x in N_v} (d_x - 1).
  std::uint64_t sigma_total(NodeId v) const { return sigma_total_[v]; }

  /// Prefix sums of (d_x - 1) over N_v, in neighbor-list order.
  std::span<const std::uint64_t> sigma_cumulative(NodeId v) const {
    return {acc_sigma_.data() + graph_->offset(v), graph_->degree(v)};
  }
  /// Prefix sums of d_{x,v} d_{v,x} over N_v, in neighbor-list order.
  std::span<const std::uint64_t> sigma_check_cumulative(NodeId v) const {
    return {acc_sigma_check_.data() + graph_->offset(v), graph_->degree(v)};
  }

  /// v with probability weight_v / total.
  template <class Engine>
  NodeId sample_node(RootWeight which, Engine& rng) const {
    const std::uint64_t tot = total(which);
    if (tot == 0)
      throw InapplicableError(std::string("no eligible structure: global weight ") + to_string(which) +
                              " is zero");
    const auto acc = cumulative(which);
    return static_cast<NodeId>(
        draw_located(rng, tot, [acc](std::uint64_t x) { return detail::search_cumulative(acc, x); }));
  }

  /// u in N_v with probability (d_u - 1) / sum_{x in N_v} (d_x - 1).
  template <class Engine>
  NeighborPick sample_sigma(NodeId v, Engine& rng) const {
    const std::uint64_t tot = sigma_total_[v];
    if (tot == 0) throw InapplicableError("sigma: every neighbor of the node has degree 1");
    const auto acc = sigma_cumulative(v);
    return pick(v, draw_located(rng, tot, [acc](std::uint64_t x) { return detail::search_cumulative(acc, x); }));
  }

  /// u in N_v with probability d_{u,v} d_{v,u} / GammaCheck_v.
  template <class Engine>
  NeighborPick sample_sigma_check(NodeId v, Engine& rng) const {
    const std::uint64_t tot = node_weight_[1][v];
    if (tot == 0) throw InapplicableError("sigma-check: node has zero GammaCheck weight");
    const auto acc = sigma_check_cumulative(v);
    return pick(v, draw_located(rng, tot, [acc](std::uint64_t x) { return detail::search_cumulative(acc, x); }));
  }

  /// u in N_v with probability (d_u-1)(sum_{y != u}(d_y-1)) / Gamma2_v. Draws
  /// u from sigma and accepts with probability (S - a_u)/S; when one neighbor
  /// carries more than half of S the acceptance rate can collapse, so those
  /// nodes use an exact linear scan instead.
  template <class Engine>
  NeighborPick sample_tau(NodeId v, Engine& rng) const {
    const std::uint64_t g2 = node_weight_[3][v];
    if (g2 == 0) throw InapplicableError("tau: node has zero Gamma2 weight");
    const std::uint64_t s = sigma_total_[v];
    if (2 * sigma_max_[v] <= s) {
      for (;;) {
        const NeighborPick p = sample_sigma(v, rng);
        const std::uint64_t a = graph_->degree(p.node) - 1;
        if (uniform_below(rng, s) < s - a) return p;
      }
    }
    const auto nbrs = graph_->neighbors(v);
    const auto scan = [&](std::uint64_t x) -> std::size_t {
      std::uint64_t acc = 0;
      for (std::uint32_t i = 0; i < nbrs.size(); ++i) {
        const std::uint64_t a = graph_->degree(nbrs[i]) - 1;
        acc += a * (s - a);
        if (acc >= x) return i;
      }
      throw Error("tau: cumulative scan fell off the end");  // unreachable when g2 is consistent
    };
    return pick(v, draw_located(rng, g2, scan));
  }

  /// w in N_v minus the neighbor at `excluded_pos`, with probability
  /// (d_w - 1) / sum_{y in N_v - {u}} (d_y - 1). The excluded neighbor's
  /// sub-interval is cut out of the draw range before the binary search.
  template <class Engine>
  NeighborPick sample_mu_excluding(NodeId v, std::uint32_t excluded_pos, Engine& rng) const {
    const auto acc = sigma_cumulative(v);
    const std::uint64_t lo = excluded_pos == 0 ? 0 : acc[excluded_pos - 1];
    const std::uint64_t hole = acc[excluded_pos] - lo;
    const std::uint64_t tot = sigma_total_[v] - hole;
    if (tot == 0) throw InapplicableError("mu: no positive-weight neighbor outside the excluded one");
    return pick(v, draw_located(rng, tot, [acc, lo, hole](std::uint64_t x) {
                  return detail::search_cumulative(acc, x > lo ? x + hole : x);
                }));
  }

  // Raw arrays, exposed for serialization.
  const std::vector<std::uint64_t>& raw_node_weight(RootWeight w) const { return node_weight_[idx(w)]; }
  const std::vector<std::uint64_t>& raw_sigma_total() const { return sigma_total_; }
  const std::vector<std::uint64_t>& raw_sigma_max() const { return sigma_max_; }
  const std::vector<std::uint64_t>& raw_acc_sigma() const { return acc_sigma_; }
  const std::vector<std::uint64_t>& raw_acc_sigma_check() const { return acc_sigma_check_; }

  friend WeightIndex load_weight_index(std::istream& in, const Graph& g, const TotalOrder& order);

 private:
  static constexpr std::size_t idx(RootWeight w) { return static_cast<std::size_t>(w); }

  NeighborPick pick(NodeId v, std::size_t pos) const {
    return {graph_->neighbors(v)[pos], static_cast<std::uint32_t>(pos)};
  }

  void build_global_cumulatives() {
    static constexpr const char* kNames[4] = {"Gamma", "GammaCheck", "Gamma1", "Gamma2"};
    lambda3_ = lambda4_ = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      acc_[k].resize(node_weight_[k].size());
      std::uint64_t s = 0;
      for (std::size_t v = 0; v < node_weight_[k].size(); ++v) {
        s = detail::checked_add(s, node_weight_[k][v], kNames[k]);
        acc_[k][v] = s;
      }
      totals_[k] = s;
    }
    for (NodeId v = 0; v < graph_->node_count(); ++v) {
      const std::uint64_t d = graph_->degree(v);
      lambda3_ = detail::checked_add(lambda3_, detail::choose(d, 3, "Lambda3"), "Lambda3");
      lambda4_ = detail::checked_add(lambda4_, detail::choose(d, 4, "Lambda4"), "Lambda4");
    }
  }

  const Graph* graph_ = nullptr;
  const TotalOrder* order_ = nullptr;
  std::array<std::vector<std::uint64_t>, 4> node_weight_;
  std::array<std::vector<std::uint64_t>, 4> acc_;
  std::array<std::uint64_t, 4> totals_{};
  std::vector<std::uint64_t> sigma_total_;
  std::vector<std::uint64_t> sigma_max_;
  std::vector<std::uint64_t> acc_sigma_;
  std::vector<std::uint64_t> acc_sigma_check_;
  std::uint64_t lambda3_ = 0;
  std::uint64_t lambda4_ = 0;
};

/// Uniform neighbor of v, skipping up to two positions. `excluded` must be
/// sorted ascending and hold distinct valid positions.
template <class Engine>
NeighborPick sample_uniform_excluding_positions(const Graph& g, NodeId v,
                                                std::span<const std::uint32_t> excluded, Engine& rng) {
  const std::uint32_t d = g.degree(v);
  if (excluded.size() >= d) throw InapplicableError("uniform draw: every neighbor is excluded");
  auto i = static_cast<std::uint32_t>(uniform_below(rng, d - excluded.size()));
  for (const std::uint32_t e : excluded)
    if (i >= e) ++i;
  return {g.neighbors(v)[i], i};
}

/// Uniform node of N_v minus `excluded` (at most two nodes; nodes not adjacent
/// to v are ignored).
template <class Engine>
NeighborPick sample_uniform_excluding(const Graph& g, NodeId v, std::span<const NodeId> excluded,
                                      Engine& rng) {
  if (excluded.size() > 2) throw ConfigError("uniform draw supports at most two exclusions");
  std::array<std::uint32_t, 2> pos{};
  std::size_t k = 0;
  for (const NodeId x : excluded) {
    const std::uint32_t p = g.position(v, x);
    if (p < g.degree(v) && (k == 0 || pos[0] != p)) pos[k++] = p;
  }
  if (k == 2 && pos[0] > pos[1]) std::swap(pos[0], pos[1]);
  return sample_uniform_excluding_positions(g, v, std::span<const std::uint32_t>(pos.data(), k), rng);
}

// ---------------------------------------------------------------------------
// Binary cache. Layout (all integers little-endian u64 unless noted):
//   magic "MOSSWIDX" (8 bytes), version (1 byte), 7 zero bytes,
//   content hash, node count, neighbor-slot count (2|E|),
//   Gamma, GammaCheck, Gamma1, Gamma2, sigma total, sigma max   (node count each),
//   acc sigma, acc sigma-check                                   (slot count each).

inline constexpr char kIndexMagic[8] = {'M', 'O', 'S', 'S', 'W', 'I', 'D', 'X'};
inline constexpr std::uint8_t kIndexVersion = 1;

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t x) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xff);
  out.write(b, 8);
}

inline std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ParseError("weight index cache truncated", 0);
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= std::uint64_t{b[i]} << (8 * i);
  return x;
}

inline void put_array(std::ostream& out, const std::vector<std::uint64_t>& a) {
  for (const auto x : a) put_u64(out, x);
}

inline std::vector<std::uint64_t> get_array(std::istream& in, std::size_t n) {
  std::vector<std::uint64_t> a(n);
  for (auto& x : a) x = get_u64(in);
  return a;
}

}  // namespace detail

inline void save_weight_index(const WeightIndex& index, std::ostream& out) {
  const Graph& g = index.graph();
  out.write(kIndexMagic, 8);
  const char version[8] = {static_cast<char>(kIndexVersion), 0, 0, 0, 0, 0, 0, 0};
  out.write(version, 8);
  detail::put_u64(out, content_hash(g));
  detail::put_u64(out, g.node_count());
  detail::put_u64(out, 2 * g.edge_count());
  for (const auto w : {RootWeight::kGamma, RootWeight::kGammaCheck, RootWeight::kGamma1, RootWeight::kGamma2})
    detail::put_array(out, index.raw_node_weight(w));
  detail::put_array(out, index.raw_sigma_total());
  detail::put_array(out, index.raw_sigma_max());
  detail::put_array(out, index.raw_acc_sigma());
  detail::put_array(out, index.raw_acc_sigma_check());
}

/// Restores a cached index for `g`; throws ParseError when the cache was built
/// for a different graph or a different format version.
inline WeightIndex load_weight_index(std::istream& in, const Graph& g, const TotalOrder& order) {
  char magic[8];
  char version[8];
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kIndexMagic))
    throw ParseError("not a weight index cache (bad magic)", 0);
  if (!in.read(version, 8) || static_cast<std::uint8_t>(version[0]) != kIndexVersion)
    throw ParseError("unsupported weight index cache version", 0);
  if (detail::get_u64(in) != content_hash(g)) throw ParseError("weight index cache is for a different graph", 0);
  const std::size_t n = detail::get_u64(in);
  const std::size_t slots = detail::get_u64(in);
  if (n != g.node_count() || slots != 2 * g.edge_count())
    throw ParseError("weight index cache dimensions do not match the graph", 0);

  WeightIndex idx;
  idx.graph_ = &g;
  idx.order_ = &order;
  for (auto& w : idx.node_weight_) w = detail::get_array(in, n);
  idx.sigma_total_ = detail::get_array(in, n);
  idx.sigma_max_ = detail::get_array(in, n);
  idx.acc_sigma_ = detail::get_array(in, slots);
  idx.acc_sigma_check_ = detail::get_array(in, slots);
  idx.build_global_cumulatives();
  return idx;
}

inline void save_weight_index_file(const WeightIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write weight index cache '" + path + "'");
  save_weight_index(index, out);
}

inline WeightIndex load_weight_index_file(const std::string& path, const Graph& g, const TotalOrder& order) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open weight index cache '" + path + "'");
  return load_weight_index(in, g, order);
}

}  // namespace moss
