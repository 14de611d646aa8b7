#pragma once

// Fixtures and exact oracles shared by the unit tests and the acceptance run.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "moss/moss.hpp"

namespace moss_test {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using moss::Graph;
using moss::Method;
using moss::NodeId;

inline Graph make_graph(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) {
  return Graph::from_edges(n, std::move(edges));
}

inline Graph complete_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b) e.emplace_back(a, b);
  return make_graph(n, e);
}

inline Graph path_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId a = 0; a + 1 < n; ++a) e.emplace_back(a, a + 1);
  return make_graph(n, e);
}

inline Graph cycle_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId a = 0; a < n; ++a) e.emplace_back(a, static_cast<NodeId>((a + 1) % n));
  return make_graph(n, e);
}

inline Graph star_graph(std::size_t leaves) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId a = 1; a <= leaves; ++a) e.emplace_back(0, a);
  return make_graph(leaves + 1, e);
}

/// 3-star with one leaf extended: the 5-node tree with degree sequence (1,1,1,2,3).
inline Graph fork_tree() { return make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {3, 4}}); }
/// 4-cycle plus a pendant edge.
inline Graph banner() { return make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 4}}); }
/// Triangle with a two-edge tail.
inline Graph tadpole() { return make_graph(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}}); }
/// Triangle plus one pendant edge.
inline Graph tailed_triangle() { return make_graph(4, {{0, 1}, {1, 2}, {2, 0}, {2, 3}}); }

/// The small graphs on which sampler outcome trees are enumerated.
inline std::vector<std::pair<std::string, Graph>> small_graph_suite() {
  std::vector<std::pair<std::string, Graph>> out = {
      {"K4", complete_graph(4)},  {"K5", complete_graph(5)}, {"C4", cycle_graph(4)},
      {"P5", path_graph(5)},      {"fork", fork_tree()},     {"banner", banner()},
      {"tadpole", tadpole()},
  };
  for (std::uint64_t s = 0; s < 20; ++s) out.emplace_back("G(8,0.5)#" + std::to_string(s), moss::erdos_renyi(8, 0.5, s));
  return out;
}

// ---------------------------------------------------------------------------
// Outcome-tree enumeration. Every random decision of the samplers goes through
// uniform_below(rng, n) or draw_located(rng, total, locate); this engine
// supplies scripted branches for both so a depth-first walk visits every
// decision path of one trial exactly once, carrying its exact probability.

struct TooDeep {};

struct ScriptEngine {
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { throw std::logic_error("raw draws are not scripted"); }

  std::vector<std::uint64_t> script;  // branch taken at each decision
  std::vector<std::uint64_t> ranges;  // branch count at each decision
  std::vector<std::uint64_t> num;     // probability of the branch taken: num / den
  std::vector<std::uint64_t> den;
  std::size_t pos = 0;
  std::size_t cap = 0;

  std::uint64_t decide(std::uint64_t branches) {
    if (pos >= cap) throw TooDeep{};
    if (pos == script.size()) {
      script.push_back(0);
      ranges.push_back(branches);
      num.push_back(0);
      den.push_back(0);
    } else if (ranges[pos] != branches) {
      throw std::logic_error("decision range changed under replay");
    }
    return script[pos];
  }
};

inline std::uint64_t uniform_below(ScriptEngine& e, std::uint64_t n) {
  const std::uint64_t b = e.decide(n);
  e.num[e.pos] = 1;
  e.den[e.pos] = n;
  ++e.pos;
  return b;
}

/// One branch per located item, weighted by the length of its value run.
template <class Locate>
std::size_t draw_located(ScriptEngine& e, std::uint64_t total, Locate&& locate) {
  std::vector<std::pair<std::size_t, std::uint64_t>> runs;  // item, run length
  for (std::uint64_t x = 1; x <= total;) {
    const std::size_t item = locate(x);
    std::uint64_t lo = x, hi = total;  // last value mapping to item
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo + 1) / 2;
      if (locate(mid) == item)
        lo = mid;
      else
        hi = mid - 1;
    }
    runs.emplace_back(item, lo - x + 1);
    x = lo + 1;
  }
  const std::uint64_t b = e.decide(runs.size());
  e.num[e.pos] = runs[b].second;
  e.den[e.pos] = total;
  ++e.pos;
  return runs[b].first;
}

/// Exact per-trial outcome probabilities.
struct OutcomeDistribution {
  std::map<int, Rational> credited;  // motif id -> probability
  Rational degenerate = 0;
  Rational non_credited = 0;
  Rational total() const {
    Rational s = degenerate + non_credited;
    for (const auto& [id, p] : credited) s += p;
    return s;
  }
  Rational hit(int id) const {
    const auto it = credited.find(id);
    return it == credited.end() ? Rational(0) : it->second;
  }
};

/// Decisions in one trial that finishes without a rejection. Path-5's
/// acceptance step can repeat; runs hitting the cap are exactly the rejected
/// ones, and since a rejection restarts from the same root the distribution
/// is the accepted mass renormalized within each root branch.
inline std::size_t decision_cap(Method m) {
  switch (m) {
    case Method::kMoss4:
    case Method::kMoss4Min: return 4;
    case Method::kT5: return 5;
    case Method::kPath5: return 6;
  }
  return 0;
}

inline OutcomeDistribution enumerate_outcomes(Method m, const moss::WeightIndex& index) {
  using U128 = unsigned __int128;
  // (root branch, outcome code, denominator) -> summed numerators
  std::map<std::tuple<std::uint64_t, int, U128>, U128> leaves;
  std::map<std::uint64_t, Rational> root_mass;  // probability of each root branch
  ScriptEngine e;
  e.cap = decision_cap(m);
  for (;;) {
    e.pos = 0;
    int code = 0;
    bool complete = true;
    try {
      const auto roles = moss::draw_trial(m, index, e);
      const auto o = moss::resolve_trial(m, index.graph(), index.order(), roles);
      code = o.kind == moss::OutcomeKind::kCredited ? o.motif : o.kind == moss::OutcomeKind::kDegenerate ? -1 : -2;
    } catch (const TooDeep&) {
      complete = false;
    }
    // A path may use fewer decisions than an earlier one.
    e.script.resize(e.pos);
    e.ranges.resize(e.pos);
    e.num.resize(e.pos);
    e.den.resize(e.pos);
    if (complete) {
      U128 n = 1, d = 1;
      for (std::size_t i = 0; i < e.pos; ++i) {
        n *= e.num[i];
        d *= e.den[i];
      }
      leaves[{e.script[0], code, d}] += n;
    }
    if (e.pos > 0 && !root_mass.count(e.script[0])) root_mass[e.script[0]] = Rational(e.num[0], e.den[0]);
    // Advance the odometer over the decisions actually made.
    std::size_t k = e.script.size();
    while (k > 0 && e.script[k - 1] + 1 >= e.ranges[k - 1]) --k;
    if (k == 0) break;
    ++e.script[k - 1];
    e.script.resize(k);
    e.ranges.resize(k);
    e.num.resize(k);
    e.den.resize(k);
  }
  auto to_big = [](U128 x) {
    BigInt b = static_cast<std::uint64_t>(x >> 64);
    b <<= 64;
    b += static_cast<std::uint64_t>(x);
    return b;
  };
  // Rejections restart from the same root, so accepted mass is rescaled
  // within each root branch.
  std::map<std::uint64_t, Rational> accepted;
  for (const auto& [key, sum] : leaves) accepted[std::get<0>(key)] += Rational(to_big(sum), to_big(std::get<2>(key)));
  OutcomeDistribution d;
  for (const auto& [key, sum] : leaves) {
    const auto root = std::get<0>(key);
    const Rational p = Rational(to_big(sum), to_big(std::get<2>(key))) * root_mass.at(root) / accepted.at(root);
    const int code = std::get<1>(key);
    if (code == -1)
      d.degenerate += p;
    else if (code == -2)
      d.non_credited += p;
    else
      d.credited[code] += p;
  }
  return d;
}

/// Inclusion probability of one copy of motif `id`, from the catalog
/// coefficients and the global weights, as an exact fraction.
inline Rational exact_probability(Method m, const moss::WeightIndex& index, int id) {
  const auto& cat = moss::catalog();
  switch (m) {
    case Method::kMoss4: return Rational(2 * cat.phi4(1, id), index.gamma());
    case Method::kMoss4Min: {
      const int num = id == 3 ? 2 : id == 5 ? 2 : id == 6 ? 6 : 0;
      return Rational(num, index.gamma_check());
    }
    case Method::kT5: return Rational(2 * cat.phi5(1, id), index.gamma1());
    case Method::kPath5: return Rational(2 * cat.phi5(2, id), index.gamma2());
  }
  return 0;
}

/// Bundles a graph with its order and weight index (which refer to it).
struct Indexed {
  Graph graph;
  moss::TotalOrder order;
  moss::WeightIndex index;

  explicit Indexed(Graph g) : graph(std::move(g)), order(graph), index(graph, order) {}
  Indexed(const Indexed&) = delete;
  Indexed& operator=(const Indexed&) = delete;
};

}  // namespace moss_test
