#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "moss/error.hpp"
#include "moss/estimators.hpp"
#include "moss/method.hpp"
#include "moss/random.hpp"
#include "moss/report_io.hpp"
#include "moss/samplers.hpp"
#include "moss/tape.hpp"
#include "moss/vertex_sim.hpp"
#include "moss/weight_index.hpp"

namespace moss {

enum class Engine { kDirect, kVertex };

/// Settings shared by the sample, experiment and plan commands.
struct RunConfig {
  std::string input;
  std::string method = "moss4";  // moss4, moss4min, moss5, t5, path5
  std::uint64_t budget = 1000;   // K, K-check, or K1
  std::uint64_t budget2 = 0;     // K2 for moss5; 0 means equal to budget
  std::uint64_t repeats = 1;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  Engine engine = Engine::kDirect;
  std::string tape;
  std::string output;
  std::string format = "json";
  double level = 0.95;
  std::string ground_truth;
  double epsilon = 0.1;
  double delta = 0.01;
  std::uint64_t pilot = 20000;
  std::vector<int> motifs;

  Json to_json() const {
    return Json{{"input", input},
                {"method", method},
                {"budget", budget},
                {"budget2", budget2 ? budget2 : budget},
                {"repeats", repeats},
                {"seed", seed},
                {"workers", workers},
                {"engine", engine == Engine::kDirect ? "direct" : "vertex"},
                {"tape", tape},
                {"format", format},
                {"level", level},
                {"ground_truth", ground_truth},
                {"epsilon", epsilon},
                {"delta", delta},
                {"pilot", pilot},
                {"motifs", motifs}};
  }

  void validate() const {
    if (budget == 0) throw ConfigError("--budget must be at least 1");
    if (repeats == 0) throw ConfigError("--repeats must be at least 1");
    if (workers == 0) throw ConfigError("--workers must be at least 1");
    if (format != "json" && format != "csv") throw ConfigError("--format must be json or csv");
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("--level must lie in (0, 1)");
    (void)components();
  }

  /// Samplers making up the configured method.
  std::vector<Method> components() const {
    if (method == "moss5") return {Method::kT5, Method::kPath5};
    return {parse_method(method)};
  }

  std::uint64_t component_budget(std::size_t c) const { return c == 0 ? budget : (budget2 ? budget2 : budget); }

  int motif_size() const { return method == "moss5" ? 5 : moss::motif_size(components().front()); }
};

/// Seed of component `c` (0 = first sampler, 1 = second) in repetition `run`.
inline std::uint64_t component_seed(std::uint64_t seed, std::uint64_t run, std::uint64_t c) {
  return stream_seed(stream_seed(seed, run), c);
}

struct SampleOutcome {
  EstimateReport report;
  std::vector<Tally> tallies;
  std::vector<VertexRunStats> vertex_stats;
};

inline EstimateReport estimate_from(const RunConfig& cfg, const std::vector<Tally>& tallies, const WeightIndex& index) {
  if (cfg.method == "moss5") return estimate_moss5(tallies.at(0), tallies.at(1), index);
  return estimate_single(tallies.at(0), index);
}

/// One estimation run. `record` collects the direct samplers' tapes; `replay`
/// feeds recorded tapes to the vertex engine (which then ignores the budgets).
inline SampleOutcome sample_once(const RunConfig& cfg, const WeightIndex& index, std::uint64_t run = 0,
                                 std::vector<Tape>* record = nullptr, const std::vector<Tape>* replay = nullptr) {
  const auto comps = cfg.components();
  if (replay && replay->size() != comps.size())
    throw TapeError("tape file holds " + std::to_string(replay->size()) + " sections, method needs " +
                    std::to_string(comps.size()));
  SampleOutcome out;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const Method m = comps[c];
    const std::uint64_t seed = component_seed(cfg.seed, run, c);
    if (cfg.engine == Engine::kDirect) {
      Tape tape(m);
      out.tallies.push_back(
          run_sampler_parallel(m, index, cfg.component_budget(c), seed, cfg.workers, record ? &tape : nullptr));
      if (record) record->push_back(std::move(tape));
    } else {
      SuperstepEngine engine(index, m);
      if (replay) {
        out.tallies.push_back(engine.replay((*replay)[c]));
      } else {
        Rng rng = make_rng(seed);
        out.tallies.push_back(engine.run(cfg.component_budget(c), rng));
      }
      out.vertex_stats.push_back(engine.stats());
    }
  }
  out.report = estimate_from(cfg, out.tallies, index);
  return out;
}

/// Analytic covariance for `cfg`'s estimators at counts `n`.
inline Matrix analytic_covariance(const RunConfig& cfg, const WeightIndex& index, const std::vector<double>& n) {
  if (cfg.method == "moss5") return moss5_covariance(index, cfg.component_budget(0), cfg.component_budget(1), n);
  const Method m = cfg.components().front();
  if (m == Method::kMoss4) return moss4_covariance(index, cfg.budget, n);
  return single_source_covariance(m, inclusion_probabilities(m, index), n, static_cast<double>(cfg.budget));
}

struct MotifMetrics {
  int id = 0;
  std::optional<double> truth;
  double mean = 0.0;
  double empirical_variance = 0.0;
  double analytic_variance = 0.0;  // at the truth when known, else at the mean estimate
  std::optional<double> nrmse;
  std::optional<double> std_err;
  std::optional<double> nrmse_min;  // MOSS-4Min NRMSE (method moss4, motifs 3, 5, 6)
};

struct ExperimentResult {
  std::uint64_t runs = 0;
  bool degenerate = false;  // a single run: NRMSE is one absolute deviation
  std::vector<MotifMetrics> motifs;
  std::vector<std::vector<double>> estimates;  // estimates[r][id]
};

/// `repeats` independent runs, compared against `truth` when given. For
/// method moss4 the same number of MOSS-4Min runs is added for motifs 3, 5, 6.
inline ExperimentResult run_experiment(const RunConfig& cfg, const WeightIndex& index, const GroundTruth* truth) {
  cfg.validate();
  if (truth && truth->motif_size != cfg.motif_size())
    throw ConfigError("ground truth lists " + std::to_string(truth->motif_size) + "-node motifs, method samples " +
                      std::to_string(cfg.motif_size()) + "-node motifs");
  ExperimentResult res;
  res.runs = cfg.repeats;
  res.degenerate = cfg.repeats < 2;
  std::vector<int> ids;
  for (std::uint64_t r = 0; r < cfg.repeats; ++r) {
    const auto out = sample_once(cfg, index, r);
    if (ids.empty()) ids = out.report.ids;
    res.estimates.push_back(out.report.estimate);
  }
  const bool compare_min = cfg.method == "moss4" && index.gamma_check() > 0;
  std::vector<std::vector<double>> min_estimates;
  if (compare_min)
    for (std::uint64_t r = 0; r < cfg.repeats; ++r) {
      const Tally t = run_sampler_parallel(Method::kMoss4Min, index, cfg.budget, component_seed(cfg.seed, r, 7),
                                           cfg.workers);
      min_estimates.push_back(estimate_moss4min(t, index).estimate);
    }

  const std::size_t width = res.estimates.front().size();
  std::vector<double> mean(width, 0.0);
  for (const auto& e : res.estimates)
    for (std::size_t i = 0; i < width; ++i) mean[i] += e[i] / static_cast<double>(cfg.repeats);
  const Matrix cov = analytic_covariance(cfg, index, truth ? truth->counts : mean);

  for (const int id : ids) {
    const auto a = static_cast<std::size_t>(id);
    MotifMetrics m;
    m.id = id;
    m.mean = mean[a];
    m.analytic_variance = cov[a][a];
    double dev = 0.0;
    for (const auto& e : res.estimates) dev += (e[a] - mean[a]) * (e[a] - mean[a]);
    m.empirical_variance = cfg.repeats > 1 ? dev / static_cast<double>(cfg.repeats - 1) : 0.0;
    const double base = truth ? truth->counts[a] : mean[a];
    if (truth) m.truth = truth->counts[a];
    if (base != 0.0) m.std_err = std::sqrt(m.analytic_variance) / base;
    auto nrmse_of = [&](const std::vector<std::vector<double>>& runs) {
      double sq = 0.0;
      for (const auto& e : runs) sq += (e[a] - base) * (e[a] - base);
      return std::sqrt(sq / static_cast<double>(runs.size())) / base;
    };
    if (truth && base != 0.0) {
      m.nrmse = nrmse_of(res.estimates);
      if (compare_min && (id == 3 || id == 5 || id == 6)) m.nrmse_min = nrmse_of(min_estimates);
    }
    res.motifs.push_back(m);
  }
  return res;
}

inline Json to_json(const ExperimentResult& r) {
  Json motifs = Json::array();
  for (const auto& m : r.motifs) {
    Json j{{"motif_id", m.id}, {"mean_estimate", m.mean}, {"empirical_variance", m.empirical_variance},
           {"analytic_variance", m.analytic_variance}};
    j["truth"] = m.truth ? Json(*m.truth) : Json(nullptr);
    j["stderr"] = m.std_err ? Json(*m.std_err) : Json(nullptr);
    j["nrmse"] = m.nrmse ? Json(*m.nrmse) : Json(nullptr);
    j["nrmse_over_stderr"] = m.nrmse && m.std_err && *m.std_err > 0 ? Json(*m.nrmse / *m.std_err) : Json(nullptr);
    if (m.nrmse_min) {
      j["nrmse_moss4min"] = *m.nrmse_min;
      j["nrmse_ratio_moss4_over_moss4min"] = *m.nrmse_min > 0 ? Json(*m.nrmse / *m.nrmse_min) : Json(nullptr);
    }
    motifs.push_back(j);
  }
  return Json{{"runs", r.runs}, {"degenerate_single_run", r.degenerate}, {"motifs", motifs}};
}

/// Fixed report columns, then empirical_variance, nrmse_over_stderr,
/// nrmse_moss4min, nrmse_ratio.
inline void write_experiment_csv(std::ostream& out, const Provenance& p, const ExperimentResult& r, double level) {
  const double z = normal_quantile(level);
  out << "# tool: moss " << kVersion << '\n';
  out << "# command: " << p.command << '\n';
  out << "# seed: " << p.seed << '\n';
  out << "# graph_hash: " << hex64(p.graph_hash) << '\n';
  out << "# config: " << p.config.dump() << '\n';
  if (r.degenerate) out << "# warning: single run, nrmse is a single absolute deviation\n";
  out << "motif_id,estimate,variance,stderr,nrmse,ci_low,ci_high,empirical_variance,nrmse_over_stderr,"
         "nrmse_moss4min,nrmse_ratio\n";
  for (const auto& m : r.motifs) {
    const double half = z * std::sqrt(m.analytic_variance / static_cast<double>(r.runs));
    std::optional<double> ratio, ratio_min;
    if (m.nrmse && m.std_err && *m.std_err > 0) ratio = *m.nrmse / *m.std_err;
    if (m.nrmse && m.nrmse_min && *m.nrmse_min > 0) ratio_min = *m.nrmse / *m.nrmse_min;
    out << m.id << ',' << detail::csv_number(m.mean) << ',' << detail::csv_number(m.analytic_variance) << ','
        << detail::csv_optional(m.std_err) << ',' << detail::csv_optional(m.nrmse) << ','
        << detail::csv_number(m.mean - half) << ',' << detail::csv_number(m.mean + half) << ','
        << detail::csv_number(m.empirical_variance) << ',' << detail::csv_optional(ratio) << ','
        << detail::csv_optional(m.nrmse_min) << ',' << detail::csv_optional(ratio_min) << '\n';
  }
}

struct PlanEntry {
  int id = 0;
  double probability = 0.0;  // p_i of the sampler used for this motif
  double pilot = 0.0;        // pilot estimate of n_i
  std::uint64_t budget = 0;  // K*
  std::string sampler;
};

struct PlanResult {
  std::vector<PlanEntry> entries;
  std::uint64_t max_budget = 0;
  std::vector<int> no_pilot_hits;  // default motif set only: skipped, count likely zero
  std::vector<Tally> pilot_tallies;
};

/// Pilot run with budget cfg.pilot, then K* per requested motif (all directly
/// sampled motifs with pilot hits when none are requested). For moss5 each
/// motif takes the smaller K* of the samplers that see it.
inline PlanResult plan_budgets(const RunConfig& cfg, const WeightIndex& index) {
  if (cfg.pilot == 0) throw ConfigError("pilot budget must be at least 1");
  PlanResult res;
  const auto comps = cfg.components();
  std::vector<std::vector<double>> est, prob;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const Tally t =
        run_sampler_parallel(comps[c], index, cfg.pilot, component_seed(cfg.seed, 0, c), cfg.workers);
    est.push_back(estimate_single(t, index).estimate);
    prob.push_back(inclusion_probabilities(comps[c], index));
    res.pilot_tallies.push_back(t);
  }
  std::vector<int> ids = cfg.motifs;
  const bool defaulted = ids.empty();
  if (defaulted) {
    for (int i = 1; i <= motif_count(comps.front()); ++i)
      for (std::size_t c = 0; c < comps.size(); ++c)
        if (prob[c][static_cast<std::size_t>(i)] > 0) {
          ids.push_back(i);
          break;
        }
  }
  for (const int id : ids) {
    if (id < 1 || id > motif_count(comps.front())) throw ConfigError("motif id " + std::to_string(id) + " out of range");
    const auto a = static_cast<std::size_t>(id);
    std::optional<PlanEntry> best;
    bool seen = false;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (prob[c][a] <= 0) continue;
      seen = true;
      if (est[c][a] <= 0) continue;
      PlanEntry e{id, prob[c][a], est[c][a], plan_budget(prob[c][a], est[c][a], cfg.epsilon, cfg.delta),
                  to_string(comps[c])};
      if (!best || e.budget < best->budget) best = e;
    }
    if (!seen) throw ConfigError("motif " + std::to_string(id) + " is not sampled directly by " + cfg.method);
    if (!best && defaulted) {
      res.no_pilot_hits.push_back(id);
      continue;
    }
    if (!best)
      throw ConfigError("pilot produced no hits for motif " + std::to_string(id) + "; increase pilot budget");
    res.max_budget = std::max(res.max_budget, best->budget);
    res.entries.push_back(*best);
  }
  return res;
}

inline Json to_json(const PlanResult& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"motif_id", e.id},
                       {"sampler", e.sampler},
                       {"probability", e.probability},
                       {"pilot_estimate", e.pilot},
                       {"budget", e.budget}});
  return Json{{"motifs", entries}, {"max_budget", r.max_budget}, {"no_pilot_hits", r.no_pilot_hits}};
}

}  // namespace moss
