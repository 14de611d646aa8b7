#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "moss/error.hpp"
#include "moss/graph.hpp"
#include "moss/method.hpp"
#include "moss/motif_catalog.hpp"
#include "moss/random.hpp"
#include "moss/small_graph.hpp"
#include "moss/tape.hpp"
#include "moss/weight_index.hpp"

namespace moss {

/// Per-motif hit counts of one sampling run. `hits` is indexed by motif ID
/// (entry 0 unused).
struct Tally {
  Method method = Method::kMoss4;
  std::uint64_t budget = 0;
  std::vector<std::uint64_t> hits;
  std::uint64_t degenerate = 0;    // role nodes collided
  std::uint64_t non_credited = 0;  // MOSS-4Min only: 4 distinct nodes, class outside {3,5,6}

  static Tally empty(Method m) {
    Tally t;
    t.method = m;
    t.hits.assign(static_cast<std::size_t>(motif_count(m)) + 1, 0);
    return t;
  }

  std::uint64_t hit(int id) const { return hits.at(static_cast<std::size_t>(id)); }

  std::uint64_t total_hits() const {
    std::uint64_t s = 0;
    for (const auto h : hits) s += h;
    return s;
  }

  bool balanced() const { return total_hits() + degenerate + non_credited == budget; }

  void merge(const Tally& other) {
    if (other.method != method) throw ConfigError("cannot merge tallies of different methods");
    budget += other.budget;
    for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += other.hits[i];
    degenerate += other.degenerate;
    non_credited += other.non_credited;
  }

  friend bool operator==(const Tally&, const Tally&) = default;
};

/// Role nodes of one trial in slot order v, u, w, r, t (t unused for 4-node
/// methods).
using Roles = std::array<NodeId, 5>;

enum class OutcomeKind { kCredited, kDegenerate, kNonCredited };

struct Outcome {
  OutcomeKind kind;
  int motif;  // class ID when credited or non-credited, 0 when degenerate

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// The method's collision guard: true when the trial yields fewer than the
/// target number of distinct nodes and is discarded.
inline bool trial_degenerate(Method m, const Roles& s) {
  const NodeId u = s[1], w = s[2], r = s[3], t = s[4];
  switch (m) {
    case Method::kMoss4:
    case Method::kMoss4Min: return !(r != u && r != w);
    case Method::kT5: return !(t != w && t != r);
    case Method::kPath5: return !(t != u && r != w && t != r);
  }
  return true;
}

/// Subgraph induced on `nodes` (at most five), node i of the result being
/// nodes[i].
inline SmallGraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  SmallGraph s;
  s.n = static_cast<int>(nodes.size());
  for (int i = 0; i < s.n; ++i)
    for (int j = i + 1; j < s.n; ++j)
      if (g.has_edge(nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(j)])) s.add_edge(i, j);
  return s;
}

/// Order ranks of the role nodes in slot order (4-node methods use four).
using SlotRanks = std::array<std::uint32_t, 5>;

/// Whether a MOSS-4Min traversal of a diamond (motif 5) is the one credited.
///
/// Slots 0..3 hold v, u, w, r; the traversal is the path w-v-u-r with
/// w above u and r above v. A diamond has 2, 4 or 6 such ordered traversals
/// depending on how the order ranks its nodes, so only the canonical path
/// (smallest rank sequence, read in either direction) is credited. That
/// leaves exactly two crediting traversals per diamond.
inline bool canonical_diamond_traversal(const SmallGraph& induced, const SlotRanks& rank) {
  using Key = std::array<std::uint32_t, 4>;
  auto key_of = [&](int v, int u, int w, int r) {
    Key a{rank[static_cast<std::size_t>(w)], rank[static_cast<std::size_t>(v)], rank[static_cast<std::size_t>(u)],
          rank[static_cast<std::size_t>(r)]};
    Key b{a[3], a[2], a[1], a[0]};
    return std::min(a, b);
  };
  std::optional<Key> best;
  std::array<int, 4> p{0, 1, 2, 3};
  do {
    const int v = p[0], u = p[1], w = p[2], r = p[3];
    if (!induced.has_edge(v, u) || !induced.has_edge(v, w) || !induced.has_edge(u, r)) continue;
    if (rank[static_cast<std::size_t>(w)] <= rank[static_cast<std::size_t>(u)]) continue;
    if (rank[static_cast<std::size_t>(r)] <= rank[static_cast<std::size_t>(v)]) continue;
    const Key k = key_of(v, u, w, r);
    if (!best || k < *best) best = k;
  } while (std::next_permutation(p.begin(), p.end()));
  return best && *best == key_of(0, 1, 2, 3);
}

/// Credits a non-degenerate trial whose induced subgraph (in slot order) is
/// `induced`. MOSS-4Min needs the slot ranks to settle diamonds.
inline Outcome classify_outcome(Method m, const SmallGraph& induced, const SlotRanks* ranks = nullptr) {
  const auto& cat = catalog();
  if (motif_size(m) == 4) {
    const int id = cat.classify4(induced);
    if (id == kNotConnected) throw Error("sampled 4-node subgraph is not connected");
    if (m == Method::kMoss4Min) {
      if (id != 3 && id != 5 && id != 6) return {OutcomeKind::kNonCredited, id};
      if (id == 5) {
        if (!ranks) throw Error("MOSS-4Min classification needs the order ranks");
        if (!canonical_diamond_traversal(induced, *ranks)) return {OutcomeKind::kNonCredited, id};
      }
    }
    return {OutcomeKind::kCredited, id};
  }
  const int id = cat.classify5(induced);
  if (id == kNotConnected) throw Error("sampled 5-node subgraph is not connected");
  return {OutcomeKind::kCredited, id};
}

inline SlotRanks slot_ranks(const TotalOrder& order, const Roles& roles, int k) {
  SlotRanks out{};
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = order.rank(roles[static_cast<std::size_t>(i)]);
  return out;
}

/// Guard plus classification of one trial, querying the graph for edges.
inline Outcome resolve_trial(Method m, const Graph& g, const TotalOrder& order, const Roles& roles) {
  if (trial_degenerate(m, roles)) return {OutcomeKind::kDegenerate, 0};
  const int k = motif_size(m);
  const std::span<const NodeId> nodes(roles.data(), static_cast<std::size_t>(k));
  const SlotRanks ranks = slot_ranks(order, roles, k);
  return classify_outcome(m, induced_subgraph(g, nodes), &ranks);
}

inline void record_outcome(Tally& tally, const Outcome& o) {
  switch (o.kind) {
    case OutcomeKind::kCredited: ++tally.hits[static_cast<std::size_t>(o.motif)]; break;
    case OutcomeKind::kDegenerate: ++tally.degenerate; break;
    case OutcomeKind::kNonCredited: ++tally.non_credited; break;
  }
}

namespace detail {

template <class Engine>
NodeId uniform_in(std::span<const NodeId> set, Engine& rng) {
  return set[uniform_below(rng, set.size())];
}

/// Uniform neighbor of `a` other than `b` (b must be adjacent to a).
template <class Engine>
NodeId uniform_neighbor_except(const Graph& g, NodeId a, NodeId b, Engine& rng) {
  const std::uint32_t pos = g.position(a, b);
  return sample_uniform_excluding_positions(g, a, std::span<const std::uint32_t>(&pos, 1), rng).node;
}

}  // namespace detail

/// Draws the role nodes of one trial and appends them to `tape` if given.
template <class Engine>
Roles draw_trial(Method m, const WeightIndex& index, Engine& rng, Tape* tape = nullptr) {
  const Graph& g = index.graph();
  const TotalOrder& order = index.order();
  Roles s{};
  NodeId& v = s[0];
  NodeId& u = s[1];
  NodeId& w = s[2];
  NodeId& r = s[3];
  NodeId& t = s[4];
  v = index.sample_node(root_weight(m), rng);
  switch (m) {
    case Method::kMoss4: {
      const NeighborPick pu = index.sample_sigma(v, rng);
      u = pu.node;
      w = sample_uniform_excluding_positions(g, v, std::span<const std::uint32_t>(&pu.pos, 1), rng).node;
      r = detail::uniform_neighbor_except(g, u, v, rng);
      break;
    }
    case Method::kMoss4Min: {
      u = index.sample_sigma_check(v, rng).node;
      w = detail::uniform_in(order.above_in(v, u), rng);
      r = detail::uniform_in(order.above_in(u, v), rng);
      break;
    }
    case Method::kT5: {
      const NeighborPick pu = index.sample_sigma(v, rng);
      u = pu.node;
      const NeighborPick pw =
          sample_uniform_excluding_positions(g, v, std::span<const std::uint32_t>(&pu.pos, 1), rng);
      w = pw.node;
      std::array<std::uint32_t, 2> skip{std::min(pu.pos, pw.pos), std::max(pu.pos, pw.pos)};
      r = sample_uniform_excluding_positions(g, v, std::span<const std::uint32_t>(skip), rng).node;
      t = detail::uniform_neighbor_except(g, u, v, rng);
      break;
    }
    case Method::kPath5: {
      const NeighborPick pu = index.sample_tau(v, rng);
      u = pu.node;
      w = index.sample_mu_excluding(v, pu.pos, rng).node;
      r = detail::uniform_neighbor_except(g, u, v, rng);
      t = detail::uniform_neighbor_except(g, w, v, rng);
      break;
    }
  }
  if (tape) {
    const auto labels = trial_labels(m);
    for (std::size_t i = 0; i < labels.size(); ++i) tape->push(labels[i], s[i]);
  }
  return s;
}

/// Throws unless the method can sample on this index and the budget is positive.
inline void check_runnable(Method m, const WeightIndex& index, std::uint64_t budget) {
  if (budget == 0) throw ConfigError("sampling budget must be at least 1");
  if (index.total(root_weight(m)) == 0) throw InapplicableError(inapplicable_message(m));
}

/// `budget` independent trials of method `m`.
template <class Engine>
Tally run_sampler(Method m, const WeightIndex& index, std::uint64_t budget, Engine& rng, Tape* tape = nullptr) {
  check_runnable(m, index, budget);
  if (tape && tape->method() != m) throw ConfigError("tape was created for a different method");
  Tally tally = Tally::empty(m);
  tally.budget = budget;
  if (tape) tape->reserve_trials(budget);
  const Graph& g = index.graph();
  for (std::uint64_t k = 0; k < budget; ++k) record_outcome(tally, resolve_trial(m, g, index.order(), draw_trial(m, index, rng, tape)));
  return tally;
}

/// Trials per worker: the first budget % workers workers take one extra.
inline std::vector<std::uint64_t> partition_budget(std::uint64_t budget, unsigned workers) {
  if (workers == 0) throw ConfigError("worker count must be at least 1");
  std::vector<std::uint64_t> parts(workers, budget / workers);
  for (unsigned i = 0; i < budget % workers; ++i) ++parts[i];
  return parts;
}

/// Splits the budget over `workers` threads, worker i drawing from stream
/// (seed, i). Tallies (and tapes, in worker order) are concatenated, so the
/// result depends only on (seed, workers).
inline Tally run_sampler_parallel(Method m, const WeightIndex& index, std::uint64_t budget, std::uint64_t seed,
                                  unsigned workers, Tape* tape = nullptr) {
  check_runnable(m, index, budget);
  const auto parts = partition_budget(budget, workers);
  std::vector<Tally> tallies(workers, Tally::empty(m));
  std::vector<Tape> tapes(workers, Tape(m));
  auto job = [&](unsigned i) {
    if (parts[i] == 0) return;
    Rng rng = make_rng(seed, i);
    tallies[i] = run_sampler(m, index, parts[i], rng, tape ? &tapes[i] : nullptr);
  };
  if (workers == 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned i = 0; i < workers; ++i)
      pool.emplace_back([&, i] {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  Tally out = Tally::empty(m);
  for (const auto& t : tallies) out.merge(t);
  if (tape)
    for (const auto& t : tapes) tape->append(t);
  return out;
}

}  // namespace moss
