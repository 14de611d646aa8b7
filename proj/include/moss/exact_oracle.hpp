#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "moss/error.hpp"
#include "moss/estimators.hpp"
#include "moss/graph.hpp"
#include "moss/motif_catalog.hpp"
#include "moss/order.hpp"
#include "moss/samplers.hpp"
#include "moss/weight_index.hpp"

namespace moss {

/// Exact non-induced pattern counts.
struct PatternCounts {
  std::uint64_t triangles = 0;
  std::uint64_t paths4 = 0;  // 3-edge paths
  std::uint64_t stars3 = 0;
  std::uint64_t paths5 = 0;  // 4-edge paths
  std::uint64_t forks = 0;
  std::uint64_t stars4 = 0;

  friend bool operator==(const PatternCounts&, const PatternCounts&) = default;
};

/// Exact CIS counts by motif ID (entry 0 unused) plus the pattern counts.
struct ExactCounts {
  bool has4 = false;
  bool has5 = false;
  std::array<std::uint64_t, kMotifs4 + 1> n{};
  std::array<std::uint64_t, kMotifs5 + 1> eta{};
  PatternCounts patterns;

  std::uint64_t total4() const {
    std::uint64_t s = 0;
    for (const auto x : n) s += x;
    return s;
  }
  std::uint64_t total5() const {
    std::uint64_t s = 0;
    for (const auto x : eta) s += x;
    return s;
  }
  /// Counts of `size`-node motifs as doubles, indexed by ID.
  std::vector<double> as_vector(int size) const {
    if (size == 4) return {n.begin(), n.end()};
    return {eta.begin(), eta.end()};
  }
};

struct OracleOptions {
  double cap = 1e8;                 // refuse enumeration above this many projected CISes
  std::uint64_t pilot_budget = 20000;
  std::uint64_t seed = 0x5eed;
  unsigned workers = 1;
};

namespace detail {

inline double binomial_double(double n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

inline std::uint32_t pair_mask_of(const Graph& g, const NodeId* nodes, int k) {
  std::uint32_t mask = 0;
  int bit = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j, ++bit)
      if (g.has_edge(nodes[i], nodes[j])) mask |= 1U << bit;
  return mask;
}

/// ESU enumeration for roots v with v % stride == offset.
class EsuWorker {
 public:
  EsuWorker(const Graph& g, int k) : g_(g), k_(k), blocked_(g.node_count(), 0), counts_(k == 4 ? 7 : 22, 0) {}

  void run(unsigned offset, unsigned stride) {
    const auto& cat = catalog();
    lut_ = &cat;
    for (NodeId v = offset; v < g_.node_count(); v += stride) {
      root_ = v;
      sub_[0] = v;
      mark(v, +1);
      auto& ext = ext_[1];
      ext.clear();
      for (const NodeId u : g_.neighbors(v))
        if (u > v) ext.push_back(u);
      extend(1);
      mark(v, -1);
    }
  }

  const std::vector<std::uint64_t>& counts() const { return counts_; }

 private:
  void mark(NodeId x, int delta) {
    blocked_[x] += delta;
    for (const NodeId y : g_.neighbors(x)) blocked_[y] += delta;
  }

  void classify() {
    const std::uint32_t mask = pair_mask_of(g_, sub_.data(), k_);
    const int id = k_ == 4 ? lut_->classify4_mask(mask) : lut_->classify5_mask(mask);
    if (id == kNotConnected) throw Error("enumerated subgraph is not connected");
    ++counts_[static_cast<std::size_t>(id)];
  }

  /// `size` nodes are in sub_, ext_[size] holds the extension set.
  void extend(int size) {
    auto& ext = ext_[static_cast<std::size_t>(size)];
    if (size == k_ - 1) {
      for (const NodeId w : ext) {
        sub_[static_cast<std::size_t>(size)] = w;
        classify();
      }
      return;
    }
    while (!ext.empty()) {
      const NodeId w = ext.back();
      ext.pop_back();
      auto& next = ext_[static_cast<std::size_t>(size) + 1];
      next = ext;
      for (const NodeId u : g_.neighbors(w))
        if (u > root_ && blocked_[u] == 0) next.push_back(u);
      sub_[static_cast<std::size_t>(size)] = w;
      mark(w, +1);
      extend(size + 1);
      mark(w, -1);
    }
  }

  const Graph& g_;
  int k_;
  const MotifCatalog* lut_ = nullptr;
  NodeId root_ = 0;
  std::array<NodeId, 5> sub_{};
  std::array<std::vector<NodeId>, 6> ext_;
  std::vector<std::int32_t> blocked_;  // closed-neighborhood membership count w.r.t. sub_
  std::vector<std::uint64_t> counts_;
};

}  // namespace detail

/// Estimated number of connected induced k-node subgraphs, from a short pilot
/// sampling run. Uses the trivial bound C(|V|, k) when that is already small.
inline double project_cis_count(const WeightIndex& index, int k, const OracleOptions& opt) {
  const Graph& g = index.graph();
  const double bound = detail::binomial_double(static_cast<double>(g.node_count()), k);
  if (bound <= opt.cap) return bound;
  Rng rng = make_rng(opt.seed, 0x0ac1e);
  if (k == 4) {
    if (index.gamma() == 0) return static_cast<double>(index.lambda3());  // only 3-stars remain
    const auto rep = estimate_moss4(run_sampler(Method::kMoss4, index, opt.pilot_budget, rng), index);
    double s = 0.0;
    for (const int i : rep.ids) s += rep.value(i);
    return s;
  }
  // A method with zero root weight sees no copy of its pattern, so every motif it
  // covers has count zero; the other method's estimate stands alone.
  const auto& cat = catalog();
  std::vector<double> e1(kMotifs5 + 1, 0.0), e2(kMotifs5 + 1, 0.0);
  const bool ok1 = index.gamma1() > 0, ok2 = index.gamma2() > 0;
  if (ok1) e1 = estimate_single(run_sampler(Method::kT5, index, opt.pilot_budget, rng), index).estimate;
  if (ok2) e2 = estimate_single(run_sampler(Method::kPath5, index, opt.pilot_budget, rng), index).estimate;
  double total = 0.0, star_fill = static_cast<double>(index.lambda4());
  for (int i = 1; i <= kMotifs5; ++i) {
    if (i == 2) continue;
    const bool in1 = ok1 && cat.phi5(1, i) > 0, in2 = ok2 && cat.phi5(2, i) > 0;
    const auto a = static_cast<std::size_t>(i);
    const double x = in1 && in2 ? (e1[a] + e2[a]) / 2.0 : in1 ? e1[a] : in2 ? e2[a] : 0.0;
    total += x;
    star_fill -= cat.phi5(3, i) * x;
  }
  return total + std::max(star_fill, 0.0);
}

inline void check_cis_cap(const WeightIndex& index, int k, const OracleOptions& opt) {
  const double projected = project_cis_count(index, k, opt);
  if (projected > opt.cap)
    throw ScaleCapError("projected " + std::to_string(static_cast<long long>(projected)) + " " +
                            std::to_string(k) + "-node CISes exceeds the cap of " +
                            std::to_string(static_cast<long long>(opt.cap)),
                        projected);
}

/// Exact k-node CIS counts (k = 4 or 5) by exclusion-ordered expansion; each
/// CIS is found once, from its minimum-index node.
inline std::vector<std::uint64_t> enumerate_cis_counts(const Graph& g, int k, unsigned workers = 1) {
  if (k != 4 && k != 5) throw ConfigError("enumeration supports k = 4 or 5");
  if (workers == 0) throw ConfigError("worker count must be at least 1");
  std::vector<detail::EsuWorker> jobs;
  jobs.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) jobs.emplace_back(g, k);
  if (workers == 1) {
    jobs[0].run(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned i = 0; i < workers; ++i)
      pool.emplace_back([&, i] {
        try {
          jobs[i].run(i, workers);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  std::vector<std::uint64_t> out(k == 4 ? 7 : 22, 0);
  for (const auto& j : jobs)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += j.counts()[i];
  return out;
}

/// All-subsets reference counter for small graphs (at most 30 nodes).
inline std::vector<std::uint64_t> naive_cis_counts(const Graph& g, int k) {
  if (k != 4 && k != 5) throw ConfigError("enumeration supports k = 4 or 5");
  const std::size_t n = g.node_count();
  if (n > 30) throw ConfigError("naive enumeration is limited to 30 nodes");
  const auto& cat = catalog();
  std::vector<std::uint64_t> out(k == 4 ? 7 : 22, 0);
  std::array<NodeId, 5> pick{};
  auto rec = [&](auto&& self, int depth, NodeId from) -> void {
    if (depth == k) {
      const SmallGraph s = induced_subgraph(g, std::span<const NodeId>(pick.data(), static_cast<std::size_t>(k)));
      if (!s.connected()) return;
      const int id = k == 4 ? cat.classify4(s) : cat.classify5(s);
      ++out[static_cast<std::size_t>(id)];
      return;
    }
    for (NodeId x = from; x < n; ++x) {
      pick[static_cast<std::size_t>(depth)] = x;
      self(self, depth + 1, x + 1);
    }
  };
  rec(rec, 0, 0);
  return out;
}

/// Exact non-induced counts of triangles, 3-edge paths, 3-stars, 4-edge
/// paths, fork trees, and 4-stars by direct combinatorial enumeration.
inline PatternCounts count_noninduced_patterns(const Graph& g, double work_cap = 1e11) {
  double work = 0.0;
  for (NodeId v = 0; v < g.node_count(); ++v) work += static_cast<double>(g.degree(v)) * g.degree(v) * g.max_degree();
  if (work > work_cap) throw ScaleCapError("pattern counting work exceeds the cap", work);

  PatternCounts pc;
  auto common = [&g](NodeId a, NodeId b) {
    const auto na = g.neighbors(a), nb = g.neighbors(b);
    std::uint64_t c = 0;
    auto i = na.begin(), j = nb.begin();
    while (i != na.end() && j != nb.end()) {
      if (*i < *j) {
        ++i;
      } else if (*j < *i) {
        ++j;
      } else {
        ++c;
        ++i;
        ++j;
      }
    }
    return c;
  };

  std::uint64_t tri3 = 0;  // each triangle counted once per edge
  std::uint64_t edge_term = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const std::uint64_t du = g.degree(u);
    pc.stars3 = detail::checked_add(pc.stars3, detail::choose(du, 3, "3-stars"), "3-stars");
    pc.stars4 = detail::checked_add(pc.stars4, detail::choose(du, 4, "4-stars"), "4-stars");
    for (const NodeId v : g.neighbors(u)) {
      if (v < u) continue;
      tri3 += common(u, v);
      edge_term = detail::checked_add(edge_term, (du - 1) * (g.degree(v) - 1), "3-paths");
    }
  }
  pc.triangles = tri3 / 3;
  pc.paths4 = edge_term - 3 * pc.triangles;

  for (NodeId c = 0; c < g.node_count(); ++c) {
    const std::uint64_t dc = g.degree(c);
    const auto nc = g.neighbors(c);
    // Fork trees centered at c: subdivided branch c-x-y, two further leaves of c.
    if (dc >= 3) {
      for (const NodeId x : nc)
        for (const NodeId y : g.neighbors(x)) {
          if (y == c) continue;
          const std::uint64_t free = dc - 1 - (g.has_edge(c, y) ? 1 : 0);
          pc.forks += free * (free - 1) / 2;
        }
    }
    // 4-edge paths a-b-c-e-d with middle node c.
    for (std::size_t i = 0; i < nc.size(); ++i)
      for (std::size_t j = i + 1; j < nc.size(); ++j) {
        const NodeId b = nc[i], e = nc[j];
        const std::uint64_t adj = g.has_edge(b, e) ? 1 : 0;
        const std::uint64_t left = g.degree(b) - 1 - adj, right = g.degree(e) - 1 - adj;
        pc.paths5 += left * right - (common(b, e) - 1);
      }
  }
  return pc;
}

/// Exact counts of k-node CISes (k = 4, 5, or 0 for both) plus pattern
/// counts. Refuses with ScaleCapError when the projected CIS count exceeds
/// the cap.
inline ExactCounts enumerate_cis(const Graph& g, int k, const OracleOptions& opt = {}) {
  if (k != 0 && k != 4 && k != 5) throw ConfigError("enumeration supports k = 4 or 5");
  const TotalOrder order(g);
  const WeightIndex index(g, order);
  ExactCounts out;
  if (k == 0 || k == 4) check_cis_cap(index, 4, opt);
  if (k == 0 || k == 5) check_cis_cap(index, 5, opt);
  out.patterns = count_noninduced_patterns(g);
  if (k == 0 || k == 4) {
    const auto c = enumerate_cis_counts(g, 4, opt.workers);
    std::copy(c.begin(), c.end(), out.n.begin());
    out.has4 = true;
  }
  if (k == 0 || k == 5) {
    const auto c = enumerate_cis_counts(g, 5, opt.workers);
    std::copy(c.begin(), c.end(), out.eta.begin());
    out.has5 = true;
  }
  return out;
}

}  // namespace moss
