#pragma once

#include <string>
#include <string_view>

#include "moss/error.hpp"
#include "moss/weight_index.hpp"

namespace moss {

enum class Method { kMoss4, kMoss4Min, kT5, kPath5 };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kMoss4: return "moss4";
    case Method::kMoss4Min: return "moss4min";
    case Method::kT5: return "t5";
    case Method::kPath5: return "path5";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "moss4") return Method::kMoss4;
  if (s == "moss4min") return Method::kMoss4Min;
  if (s == "t5") return Method::kT5;
  if (s == "path5") return Method::kPath5;
  throw ConfigError("unknown sampling method '" + std::string(s) + "'");
}

/// Number of nodes in a sampled subgraph.
inline int motif_size(Method m) { return m == Method::kMoss4 || m == Method::kMoss4Min ? 4 : 5; }

/// Number of motif classes the tally is indexed over.
inline int motif_count(Method m) { return motif_size(m) == 4 ? 6 : 21; }

inline RootWeight root_weight(Method m) {
  switch (m) {
    case Method::kMoss4: return RootWeight::kGamma;
    case Method::kMoss4Min: return RootWeight::kGammaCheck;
    case Method::kT5: return RootWeight::kGamma1;
    case Method::kPath5: return RootWeight::kGamma2;
  }
  throw ConfigError("unknown sampling method");
}

/// Labels of the random choices made in one trial, in draw order.
inline std::string_view trial_labels(Method m) { return motif_size(m) == 4 ? "vuwr" : "vuwrt"; }

/// Message shown when a method has nothing to sample on a graph.
inline const char* inapplicable_message(Method m) {
  switch (m) {
    case Method::kMoss4: return "graph contains no 3-path";
    case Method::kMoss4Min: return "no centered 3-path under the node order";
    case Method::kT5: return "graph contains no fork-tree";
    case Method::kPath5: return "graph contains no 5-path center";
  }
  return "method inapplicable";
}

}  // namespace moss
