#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "moss/error.hpp"
#include "moss/graph.hpp"
#include "moss/method.hpp"
#include "moss/random.hpp"
#include "moss/samplers.hpp"
#include "moss/small_graph.hpp"
#include "moss/tape.hpp"
#include "moss/weight_index.hpp"

namespace moss {

/// Slot indices of the role nodes carried by a message.
enum Slot : int { kSlotV = 0, kSlotU = 1, kSlotW = 2, kSlotR = 3, kSlotT = 4 };

/// Partial view of one trial travelling between vertices: the role slots
/// filled so far and the adjacency entries resolved so far (-1 unknown,
/// 0 absent, 1 present; pairs (i, j), i < j, in row-major order).
struct VertexMessage {
  std::uint64_t trial = 0;
  std::array<NodeId, 5> slot{};
  std::uint8_t known = 0;  // bit i set when slot i is filled
  std::array<std::int8_t, 10> adj{-1, -1, -1, -1, -1, -1, -1, -1, -1, -1};
  NodeId sender = 0;
  NodeId dest = 0;
  std::uint64_t seq = 0;
  int stage = 0;  // number of hops taken so far

  bool has(int s) const { return known >> s & 1U; }
  void set(int s, NodeId x) {
    slot[static_cast<std::size_t>(s)] = x;
    known = static_cast<std::uint8_t>(known | (1U << s));
  }
  static std::size_t pair_index(int i, int j) {
    if (i > j) std::swap(i, j);
    static constexpr int kBase[5] = {0, 4, 7, 9, 10};
    return static_cast<std::size_t>(kBase[i] + (j - i - 1));
  }
  std::int8_t edge(int i, int j) const { return adj[pair_index(i, j)]; }
};

struct VertexRunStats {
  std::uint64_t trials = 0;
  std::uint64_t batches = 0;
  std::uint64_t messages = 0;
  std::uint64_t message_supersteps = 0;  // per batch; equal for every batch
  std::uint64_t local_sends = 0;         // destination adjacent to sender
  std::uint64_t relay_sends = 0;         // hops the model routes to a non-neighbor
  std::uint64_t min_hops = 0;
  std::uint64_t max_hops = 0;
};

/// Single-process superstep simulator running the vertex-centric form of a
/// sampler. Phase 1 draws the roots centrally and sets each node's value k_v;
/// phase 2 runs the per-vertex message handlers. Each superstep delivers the
/// previous superstep's messages ordered by sender, then send sequence.
///
/// Handler chains (receiver of each hop):
///   MOSS-4, MOSS-4Min: u, r
///   T-5:               u, t, w   (t -> w resolves the w-r pair)
///   Path-5:            u, w, t, r (u -> w and t -> r carry the message to
///                      nodes that are not necessarily neighbors of the sender)
class SuperstepEngine {
 public:
  SuperstepEngine(const WeightIndex& index, Method method) : index_(index), graph_(index.graph()), method_(method) {}

  /// Optional JSON-lines trace, one line per delivered message.
  void set_trace(std::ostream* out) { trace_ = out; }
  /// Maximum trials in flight per batch of supersteps.
  void set_batch_size(std::uint64_t b) { batch_ = std::max<std::uint64_t>(1, b); }

  /// Fresh random decisions drawn from `rng`.
  Tally run(std::uint64_t budget, Rng& rng) {
    check_runnable(method_, index_, budget);
    rng_ = &rng;
    tape_ = nullptr;
    return execute(budget);
  }

  /// Decisions replayed from a tape recorded by the direct sampler.
  Tally replay(const Tape& tape) {
    if (tape.method() != method_) throw TapeError("tape was recorded for a different method");
    tape.validate();
    check_runnable(method_, index_, tape.trial_count());
    rng_ = nullptr;
    tape_ = &tape;
    return execute(tape.trial_count());
  }

  const VertexRunStats& stats() const { return stats_; }
  /// k_v: number of trials rooted at each node in the last run.
  const std::vector<std::uint64_t>& node_values() const { return node_value_; }

  /// Hops per trial for a method.
  static int chain_length(Method m) {
    switch (m) {
      case Method::kMoss4:
      case Method::kMoss4Min: return 2;
      case Method::kT5: return 3;
      case Method::kPath5: return 4;
    }
    return 0;
  }

 private:
  Tally execute(std::uint64_t budget) {
    stats_ = {};
    stats_.trials = budget;
    stats_.min_hops = ~std::uint64_t{0};
    node_value_.assign(graph_.node_count(), 0);
    Tally tally = Tally::empty(method_);
    tally.budget = budget;
    hops_.clear();
    for (std::uint64_t first = 0; first < budget; first += batch_) {
      const std::uint64_t last = std::min(budget, first + batch_);
      run_batch(first, last, tally);
      ++stats_.batches;
    }
    if (budget == 0) stats_.min_hops = 0;
    return tally;
  }

  void run_batch(std::uint64_t first, std::uint64_t last, Tally& tally) {
    // Phase 1: roots.
    std::vector<std::pair<NodeId, std::uint64_t>> roots;
    roots.reserve(last - first);
    for (std::uint64_t k = first; k < last; ++k) {
      NodeId v;
      if (tape_) {
        v = tape_->at(k, kSlotV);
        graph_.check_node(v);
        if (index_.weight(root_weight(method_), v) == 0) throw TapeError("tape root has zero weight");
      } else {
        v = index_.sample_node(root_weight(method_), *rng_);
      }
      ++node_value_[v];
      roots.emplace_back(v, k);
    }
    std::sort(roots.begin(), roots.end());
    hops_.assign(last - first, 0);
    hop_base_ = first;

    // Superstep 0: each root node runs its k_v local starts.
    std::vector<VertexMessage> outbox;
    seq_ = 0;
    for (const auto& [v, k] : roots) start(v, k, outbox);

    std::uint64_t supersteps = 0;
    while (!outbox.empty()) {
      ++supersteps;
      std::sort(outbox.begin(), outbox.end(), [](const VertexMessage& a, const VertexMessage& b) {
        return a.sender != b.sender ? a.sender < b.sender : a.seq < b.seq;
      });
      // Stable grouping by destination keeps the per-inbox (sender, seq) order.
      std::stable_sort(outbox.begin(), outbox.end(),
                       [](const VertexMessage& a, const VertexMessage& b) { return a.dest < b.dest; });
      std::vector<VertexMessage> inbox;
      inbox.swap(outbox);
      seq_ = 0;
      for (auto& msg : inbox) {
        if (trace_) trace(supersteps, msg);
        ++stats_.messages;
        ++hops_[msg.trial - hop_base_];
        receive(msg, outbox, tally);
      }
    }
    stats_.message_supersteps = std::max(stats_.message_supersteps, supersteps);
    for (const auto h : hops_) {
      stats_.min_hops = std::min<std::uint64_t>(stats_.min_hops, h);
      stats_.max_hops = std::max<std::uint64_t>(stats_.max_hops, h);
    }
  }

  // --- decisions ---------------------------------------------------------

  NodeId choose(int s, std::uint64_t trial, const VertexMessage& m) {
    if (tape_) {
      const NodeId x = tape_->at(trial, static_cast<std::size_t>(s));
      graph_.check_node(x);
      if (!legal(s, m, x))
        throw TapeError("tape record for '" + std::string(1, trial_labels(method_)[static_cast<std::size_t>(s)]) +
                        "' in trial " + std::to_string(trial) + " is not a possible draw");
      return x;
    }
    return draw(s, m);
  }

  NodeId draw(int s, const VertexMessage& m) {
    Rng& rng = *rng_;
    const NodeId v = m.slot[kSlotV];
    const NodeId u = m.slot[kSlotU];
    const TotalOrder& order = index_.order();
    switch (method_) {
      case Method::kMoss4:
        if (s == kSlotU) return index_.sample_sigma(v, rng).node;
        if (s == kSlotW) return detail::uniform_neighbor_except(graph_, v, u, rng);
        return detail::uniform_neighbor_except(graph_, u, v, rng);  // r
      case Method::kMoss4Min:
        if (s == kSlotU) return index_.sample_sigma_check(v, rng).node;
        if (s == kSlotW) return detail::uniform_in(order.above_in(v, u), rng);
        return detail::uniform_in(order.above_in(u, v), rng);  // r
      case Method::kT5:
        if (s == kSlotU) return index_.sample_sigma(v, rng).node;
        if (s == kSlotW) return detail::uniform_neighbor_except(graph_, v, u, rng);
        if (s == kSlotR) {
          const NodeId excl[2] = {u, m.slot[kSlotW]};
          return sample_uniform_excluding(graph_, v, std::span<const NodeId>(excl, 2), rng).node;
        }
        return detail::uniform_neighbor_except(graph_, u, v, rng);  // t
      case Method::kPath5:
        if (s == kSlotU) return index_.sample_tau(v, rng).node;
        if (s == kSlotW) return index_.sample_mu_excluding(v, graph_.position(v, u), rng).node;
        if (s == kSlotR) return detail::uniform_neighbor_except(graph_, u, v, rng);
        return detail::uniform_neighbor_except(graph_, m.slot[kSlotW], v, rng);  // t
    }
    throw ConfigError("unknown method");
  }

  /// Whether x has positive probability for slot s given the filled slots.
  bool legal(int s, const VertexMessage& m, NodeId x) const {
    const NodeId v = m.slot[kSlotV];
    const NodeId u = m.slot[kSlotU];
    const NodeId w = m.slot[kSlotW];
    const TotalOrder& order = index_.order();
    auto adjacent = [this](NodeId a, NodeId b) { return graph_.position(a, b) < graph_.degree(a); };
    switch (method_) {
      case Method::kMoss4:
        if (s == kSlotU) return adjacent(v, x) && graph_.degree(x) >= 2;
        if (s == kSlotW) return adjacent(v, x) && x != u;
        return adjacent(u, x) && x != v;
      case Method::kMoss4Min:
        if (s == kSlotU) return adjacent(v, x) && order.count_above_in(v, x) > 0 && order.count_above_in(x, v) > 0;
        if (s == kSlotW) return adjacent(v, x) && order.above(x, u);
        return adjacent(u, x) && order.above(x, v);
      case Method::kT5:
        if (s == kSlotU) return adjacent(v, x) && graph_.degree(x) >= 2;
        if (s == kSlotW) return adjacent(v, x) && x != u;
        if (s == kSlotR) return adjacent(v, x) && x != u && x != w;
        return adjacent(u, x) && x != v;
      case Method::kPath5:
        if (s == kSlotU)
          return adjacent(v, x) && graph_.degree(x) >= 2 && index_.sigma_total(v) > graph_.degree(x) - 1;
        if (s == kSlotW) return adjacent(v, x) && x != u && graph_.degree(x) >= 2;
        if (s == kSlotR) return adjacent(u, x) && x != v;
        return adjacent(w, x) && x != v;
    }
    return false;
  }

  // --- handlers ------------------------------------------------------------

  /// Update(A): the current node fills every entry between itself and the
  /// other known slots from its own adjacency list.
  void update(NodeId self, VertexMessage& m) const {
    for (int i = 0; i < 5; ++i) {
      if (!m.has(i) || m.slot[static_cast<std::size_t>(i)] != self) continue;
      for (int j = 0; j < 5; ++j) {
        if (j == i || !m.has(j)) continue;
        const NodeId other = m.slot[static_cast<std::size_t>(j)];
        const bool present = other != self && graph_.position(self, other) < graph_.degree(self);
        m.adj[VertexMessage::pair_index(i, j)] = present ? 1 : 0;
      }
    }
  }

  void send(NodeId from, int to_slot, VertexMessage m, std::vector<VertexMessage>& outbox, bool must_be_local) {
    const NodeId to = m.slot[static_cast<std::size_t>(to_slot)];
    const bool local = graph_.position(from, to) < graph_.degree(from);
    if (local) {
      ++stats_.local_sends;
    } else {
      if (must_be_local) throw Error("vertex engine sent a message to a non-neighbor");
      ++stats_.relay_sends;
    }
    m.sender = from;
    m.dest = to;
    m.seq = seq_++;
    ++m.stage;
    outbox.push_back(m);
  }

  void start(NodeId v, std::uint64_t trial, std::vector<VertexMessage>& outbox) {
    VertexMessage m;
    m.trial = trial;
    m.set(kSlotV, v);
    m.set(kSlotU, choose(kSlotU, trial, m));
    m.set(kSlotW, choose(kSlotW, trial, m));
    if (method_ == Method::kT5) m.set(kSlotR, choose(kSlotR, trial, m));
    update(v, m);
    send(v, kSlotU, m, outbox, true);
  }

  void receive(VertexMessage& m, std::vector<VertexMessage>& outbox, Tally& tally) {
    const NodeId self = m.dest;
    switch (method_) {
      case Method::kMoss4:
      case Method::kMoss4Min:
        if (m.stage == 1) {  // at u
          m.set(kSlotR, choose(kSlotR, m.trial, m));
          update(self, m);
          send(self, kSlotR, m, outbox, true);
        } else {  // at r
          update(self, m);
          finish(m, tally);
        }
        return;
      case Method::kT5:
        if (m.stage == 1) {  // at u
          m.set(kSlotT, choose(kSlotT, m.trial, m));
          update(self, m);
          send(self, kSlotT, m, outbox, true);
        } else if (m.stage == 2) {  // at t
          update(self, m);
          send(self, kSlotW, m, outbox, false);
        } else {  // at w
          update(self, m);
          finish(m, tally);
        }
        return;
      case Method::kPath5:
        if (m.stage == 1) {  // at u
          m.set(kSlotR, choose(kSlotR, m.trial, m));
          update(self, m);
          send(self, kSlotW, m, outbox, false);
        } else if (m.stage == 2) {  // at w
          m.set(kSlotT, choose(kSlotT, m.trial, m));
          update(self, m);
          send(self, kSlotT, m, outbox, true);
        } else if (m.stage == 3) {  // at t
          update(self, m);
          send(self, kSlotR, m, outbox, false);
        } else {  // at r
          update(self, m);
          finish(m, tally);
        }
        return;
    }
  }

  void finish(const VertexMessage& m, Tally& tally) const {
    const int k = motif_size(method_);
    Roles roles{};
    for (int i = 0; i < k; ++i) roles[static_cast<std::size_t>(i)] = m.slot[static_cast<std::size_t>(i)];
    SmallGraph induced;
    induced.n = k;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        const auto e = m.edge(i, j);
        if (e < 0) throw Error("terminal handler reached with an unresolved adjacency entry");
        if (e > 0) induced.add_edge(i, j);
      }
    if (trial_degenerate(method_, roles)) {
      record_outcome(tally, {OutcomeKind::kDegenerate, 0});
      return;
    }
    const SlotRanks ranks = slot_ranks(index_.order(), roles, k);
    record_outcome(tally, classify_outcome(method_, induced, &ranks));
  }

  void trace(std::uint64_t superstep, const VertexMessage& m) const {
    std::ostream& out = *trace_;
    out << "{\"superstep\":" << superstep << ",\"trial\":" << m.trial << ",\"from\":" << m.sender
        << ",\"to\":" << m.dest << ",\"slots\":[";
    for (int i = 0; i < motif_size(method_); ++i) {
      if (i) out << ',';
      if (m.has(i))
        out << m.slot[static_cast<std::size_t>(i)];
      else
        out << "null";
    }
    out << "],\"A\":\"";
    const int pairs = motif_size(method_) == 4 ? 6 : 10;
    for (int i = 0, p = 0; i < 5 && p < pairs; ++i)
      for (int j = i + 1; j < motif_size(method_); ++j, ++p) {
        const auto e = m.edge(i, j);
        out << (e < 0 ? '?' : e > 0 ? '1' : '0');
      }
    out << "\"}\n";
  }

  const WeightIndex& index_;
  const Graph& graph_;
  Method method_;
  Rng* rng_ = nullptr;
  const Tape* tape_ = nullptr;
  std::ostream* trace_ = nullptr;
  std::uint64_t batch_ = std::uint64_t{1} << 20;
  std::uint64_t seq_ = 0;
  std::uint64_t hop_base_ = 0;
  std::vector<std::uint32_t> hops_;
  std::vector<std::uint64_t> node_value_;
  VertexRunStats stats_;
};

/// Convenience wrapper: vertex-centric run with fresh randomness.
inline Tally run_vertex_sampler(Method m, const WeightIndex& index, std::uint64_t budget, Rng& rng,
                                VertexRunStats* stats = nullptr) {
  SuperstepEngine engine(index, m);
  Tally t = engine.run(budget, rng);
  if (stats) *stats = engine.stats();
  return t;
}

/// Convenience wrapper: vertex-centric replay of a recorded tape.
inline Tally replay_vertex_sampler(const Tape& tape, const WeightIndex& index, VertexRunStats* stats = nullptr) {
  SuperstepEngine engine(index, tape.method());
  Tally t = engine.replay(tape);
  if (stats) *stats = engine.stats();
  return t;
}

}  // namespace moss
