#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "moss/error.hpp"
#include "moss/estimators.hpp"
#include "moss/exact_oracle.hpp"
#include "moss/graph.hpp"
#include "moss/samplers.hpp"
#include "moss/version.hpp"

namespace moss {

using Json = nlohmann::ordered_json;

inline std::string hex64(std::uint64_t x) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

/// Who produced an output file and from what.
struct Provenance {
  std::string command;
  Json config = Json::object();
  std::uint64_t seed = 0;
  std::uint64_t graph_hash = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;

  static Provenance of(const std::string& command, const Graph& g, std::uint64_t seed, Json config) {
    return {command, std::move(config), seed, content_hash(g), g.node_count(), g.edge_count()};
  }
};

inline Json to_json(const Provenance& p) {
  return Json{{"tool", "moss"},
              {"version", kVersion},
              {"command", p.command},
              {"seed", p.seed},
              {"graph", {{"content_hash", hex64(p.graph_hash)}, {"nodes", p.nodes}, {"edges", p.edges}}},
              {"node_order", "degree, ties by larger internal index"},
              {"config", p.config}};
}

/// One CSV row: motif_id, estimate, variance, stderr, nrmse, ci_low, ci_high.
struct ReportRow {
  int id = 0;
  double estimate = 0.0;
  double variance = 0.0;
  std::optional<double> std_err;
  std::optional<double> nrmse;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Rows for every motif of a report. StdErr is sqrt(Var)/truth when a truth
/// vector is given and sqrt(Var)/estimate otherwise (absent when zero).
inline std::vector<ReportRow> report_rows(const EstimateReport& rep, double level,
                                          const std::vector<double>* truth = nullptr) {
  std::vector<ReportRow> rows;
  const double z = normal_quantile(level);
  for (const int id : rep.ids) {
    ReportRow row;
    row.id = id;
    row.estimate = rep.value(id);
    row.variance = rep.variance(id);
    const double half = z * std::sqrt(row.variance);
    row.ci_low = row.estimate - half;
    row.ci_high = row.estimate + half;
    const double denom = truth ? (*truth)[static_cast<std::size_t>(id)] : row.estimate;
    if (denom != 0.0) row.std_err = std::sqrt(row.variance) / denom;
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<ReportRow> exact_rows(const ExactCounts& c, int size) {
  std::vector<ReportRow> rows;
  const auto v = c.as_vector(size);
  for (std::size_t id = 1; id < v.size(); ++id) {
    ReportRow row;
    row.id = static_cast<int>(id);
    row.estimate = row.ci_low = row.ci_high = v[id];
    row.std_err = 0.0;
    rows.push_back(row);
  }
  return rows;
}

inline Json to_json(const ReportRow& r) {
  Json j{{"motif_id", r.id}, {"estimate", r.estimate}, {"variance", r.variance}};
  j["stderr"] = r.std_err ? Json(*r.std_err) : Json(nullptr);
  j["nrmse"] = r.nrmse ? Json(*r.nrmse) : Json(nullptr);
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  return j;
}

inline Json to_json(const GraphConstants& c) {
  return Json{{"Gamma", c.gamma},     {"GammaCheck", c.gamma_check}, {"Gamma1", c.gamma1},
              {"Gamma2", c.gamma2},   {"Lambda3", c.lambda3},        {"Lambda4", c.lambda4}};
}

inline Json to_json(const Tally& t) {
  Json hits = Json::object();
  for (std::size_t i = 1; i < t.hits.size(); ++i) hits[std::to_string(i)] = t.hits[i];
  return Json{{"method", to_string(t.method)}, {"budget", t.budget},          {"hits", hits},
              {"degenerate", t.degenerate},    {"non_credited", t.non_credited}};
}

inline Json to_json(const EstimateReport& rep, const std::vector<ReportRow>& rows, double level) {
  Json j{{"method", rep.method},
         {"motif_size", rep.motif_size},
         {"budgets", rep.budgets},
         {"constants", to_json(rep.constants)},
         {"confidence_level", level}};
  Json motifs = Json::array();
  for (const auto& r : rows) {
    Json m = to_json(r);
    if (!rep.lambda1.empty()) {
      const auto a = static_cast<std::size_t>(r.id);
      m["estimate_t5"] = rep.estimate1[a];
      m["estimate_path5"] = rep.estimate2[a];
      m["lambda1"] = rep.lambda1[a];
      m["lambda2"] = rep.lambda2[a];
    }
    motifs.push_back(m);
  }
  j["motifs"] = motifs;
  Json cov = Json::array();
  for (const int a : rep.ids) {
    Json line = Json::array();
    for (const int b : rep.ids) line.push_back(rep.cov(a, b));
    cov.push_back(line);
  }
  j["covariance"] = {{"ids", rep.ids}, {"matrix", cov}};
  return j;
}

inline Json to_json(const PatternCounts& p) {
  return Json{{"triangles", p.triangles}, {"paths4", p.paths4}, {"stars3", p.stars3},
              {"paths5", p.paths5},       {"forks", p.forks},   {"stars4", p.stars4}};
}

inline Json to_json(const ExactCounts& c, int size) {
  Json motifs = Json::array();
  const auto v = c.as_vector(size);
  for (std::size_t id = 1; id < v.size(); ++id)
    motifs.push_back({{"motif_id", id}, {"count", size == 4 ? c.n[id] : c.eta[id]}});
  return Json{{"motif_size", size},
              {"total", size == 4 ? c.total4() : c.total5()},
              {"motifs", motifs},
              {"patterns", to_json(c.patterns)}};
}

namespace detail {

inline std::string csv_number(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

inline std::string csv_optional(const std::optional<double>& x) { return x ? csv_number(*x) : std::string(); }

}  // namespace detail

/// Provenance as '#' comment lines, then the fixed column header and rows.
inline void write_csv(std::ostream& out, const Provenance& p, const std::vector<ReportRow>& rows) {
  out << "# tool: moss " << kVersion << '\n';
  out << "# command: " << p.command << '\n';
  out << "# seed: " << p.seed << '\n';
  out << "# graph_hash: " << hex64(p.graph_hash) << '\n';
  out << "# config: " << p.config.dump() << '\n';
  out << "motif_id,estimate,variance,stderr,nrmse,ci_low,ci_high\n";
  for (const auto& r : rows)
    out << r.id << ',' << detail::csv_number(r.estimate) << ',' << detail::csv_number(r.variance) << ','
        << detail::csv_optional(r.std_err) << ',' << detail::csv_optional(r.nrmse) << ','
        << detail::csv_number(r.ci_low) << ',' << detail::csv_number(r.ci_high) << '\n';
}

/// Writes to `path`, or to stdout when path is empty or "-".
inline void write_text_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  out << text;
}

/// Motif counts from an exact-count or estimate file (CSV or JSON), indexed
/// by ID. The motif size follows from the number of rows (6 or 21).
struct GroundTruth {
  int motif_size = 0;
  std::vector<double> counts;
};

inline GroundTruth read_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open ground-truth file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::vector<std::pair<int, double>> rows;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const std::exception& e) {
      throw ParseError(std::string("ground truth: ") + e.what(), 0);
    }
    for (const auto& m : j.at("motifs")) {
      const double v = m.contains("count") ? m.at("count").get<double>() : m.at("estimate").get<double>();
      rows.emplace_back(m.at("motif_id").get<int>(), v);
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    std::size_t no = 0;
    while (std::getline(lines, line)) {
      ++no;
      if (line.empty() || line[0] == '#' || line.rfind("motif_id", 0) == 0) continue;
      std::istringstream fields(line);
      std::string id, value;
      if (!std::getline(fields, id, ',') || !std::getline(fields, value, ','))
        throw ParseError("ground truth: expected motif_id,estimate", no);
      try {
        rows.emplace_back(std::stoi(id), std::stod(value));
      } catch (const std::exception&) {
        throw ParseError("ground truth: malformed number", no);
      }
    }
  }
  GroundTruth gt;
  if (rows.size() == kMotifs4)
    gt.motif_size = 4;
  else if (rows.size() == kMotifs5)
    gt.motif_size = 5;
  else
    throw ParseError("ground truth must list all 6 four-node or all 21 five-node motifs", 0);
  gt.counts.assign(rows.size() + 1, 0.0);
  for (const auto& [id, v] : rows) {
    if (id < 1 || static_cast<std::size_t>(id) > rows.size()) throw ParseError("ground truth motif id out of range", 0);
    gt.counts[static_cast<std::size_t>(id)] = v;
  }
  return gt;
}

}  // namespace moss
