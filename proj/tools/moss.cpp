// moss: command-line front end for graphlet counting.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "moss/moss.hpp"

namespace {

using moss::Json;

enum ExitCode { kOk = 0, kIoError = 1, kConfigError = 2, kInapplicable = 3, kScaleCap = 4 };

std::string joined_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

moss::Graph load(const std::string& path) {
  if (path.empty()) throw moss::ConfigError("--input is required");
  return moss::load_edge_list_file(path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int cmd_stats(const std::string& input, const std::string& output, const std::string& command) {
  const moss::Graph g = load(input);
  const moss::TotalOrder order(g);
  const moss::WeightIndex index(g, order);
  const auto c = moss::GraphConstants::of(index);
  Json j = moss::to_json(moss::Provenance::of(command, g, 0, Json{{"input", input}}));
  j["nodes"] = g.node_count();
  j["edges"] = g.edge_count();
  j["max_degree"] = g.max_degree();
  j["constants"] = moss::to_json(c);
  j["gamma_ratio"] = c.gamma_check ? Json(static_cast<double>(c.gamma) / static_cast<double>(c.gamma_check))
                                   : Json(nullptr);
  Json warnings = Json::array();
  for (const auto m : {moss::Method::kMoss4, moss::Method::kMoss4Min, moss::Method::kT5, moss::Method::kPath5})
    if (index.total(moss::root_weight(m)) == 0) warnings.push_back(moss::inapplicable_message(m));
  j["warnings"] = warnings;
  for (const auto& w : warnings) std::cerr << "warning: " << w.get<std::string>() << '\n';
  moss::write_text_output(output, dump(j));
  return kOk;
}

int cmd_exact(const std::string& input, int size, double cap, unsigned workers, const std::string& format,
              const std::string& output, const std::string& command) {
  if (size != 4 && size != 5) throw moss::ConfigError("--size must be 4 or 5");
  const moss::Graph g = load(input);
  moss::OracleOptions opt;
  opt.cap = cap;
  opt.workers = workers;
  const auto counts = moss::enumerate_cis(g, size, opt);
  const auto prov = moss::Provenance::of(command, g, opt.seed, Json{{"input", input}, {"size", size}, {"cap", cap}});
  std::ostringstream out;
  if (format == "csv") {
    moss::write_csv(out, prov, moss::exact_rows(counts, size));
  } else {
    Json j = moss::to_json(prov);
    j["exact"] = moss::to_json(counts, size);
    out << dump(j);
  }
  moss::write_text_output(output, out.str());
  return kOk;
}

int cmd_sample(const moss::RunConfig& cfg, const std::string& command) {
  cfg.validate();
  const moss::Graph g = load(cfg.input);
  const moss::TotalOrder order(g);
  const moss::WeightIndex index(g, order);

  std::vector<moss::Tape> recorded, replay;
  const bool replaying = !cfg.tape.empty() && cfg.engine == moss::Engine::kVertex;
  const bool recording = !cfg.tape.empty() && cfg.engine == moss::Engine::kDirect;
  if (replaying) replay = moss::read_tapes_file(cfg.tape);
  const auto out = moss::sample_once(cfg, index, 0, recording ? &recorded : nullptr, replaying ? &replay : nullptr);
  if (recording) moss::write_tapes_file(recorded, cfg.tape);

  std::vector<double> truth;
  if (!cfg.ground_truth.empty()) truth = moss::read_ground_truth(cfg.ground_truth).counts;
  auto rows = moss::report_rows(out.report, cfg.level, truth.empty() ? nullptr : &truth);
  if (!truth.empty())
    for (auto& r : rows) {
      const double n = truth.at(static_cast<std::size_t>(r.id));
      if (n != 0.0) r.nrmse = std::abs(r.estimate - n) / n;
    }
  const auto prov = moss::Provenance::of(command, g, cfg.seed, cfg.to_json());
  std::ostringstream text;
  if (cfg.format == "csv") {
    moss::write_csv(text, prov, rows);
  } else {
    Json j = moss::to_json(prov);
    j["report"] = moss::to_json(out.report, rows, cfg.level);
    Json tallies = Json::array();
    for (const auto& t : out.tallies) tallies.push_back(moss::to_json(t));
    j["tallies"] = tallies;
    if (!out.vertex_stats.empty()) {
      Json vs = Json::array();
      for (const auto& s : out.vertex_stats)
        vs.push_back({{"trials", s.trials},
                      {"batches", s.batches},
                      {"messages", s.messages},
                      {"message_supersteps", s.message_supersteps},
                      {"local_sends", s.local_sends},
                      {"relay_sends", s.relay_sends}});
      j["vertex_engine"] = vs;
    }
    text << dump(j);
  }
  moss::write_text_output(cfg.output, text.str());
  return kOk;
}

int cmd_experiment(const moss::RunConfig& cfg, const std::string& command) {
  cfg.validate();
  const moss::Graph g = load(cfg.input);
  const moss::TotalOrder order(g);
  const moss::WeightIndex index(g, order);
  std::optional<moss::GroundTruth> truth;
  if (!cfg.ground_truth.empty())
    truth = moss::read_ground_truth(cfg.ground_truth);
  else
    std::cerr << "warning: no ground truth given, NRMSE omitted\n";
  const auto res = moss::run_experiment(cfg, index, truth ? &*truth : nullptr);
  if (res.degenerate) std::cerr << "warning: a single run gives a degenerate NRMSE\n";
  const auto prov = moss::Provenance::of(command, g, cfg.seed, cfg.to_json());
  std::ostringstream text;
  if (cfg.format == "csv") {
    moss::write_experiment_csv(text, prov, res, cfg.level);
  } else {
    Json j = moss::to_json(prov);
    j["experiment"] = moss::to_json(res);
    text << dump(j);
  }
  moss::write_text_output(cfg.output, text.str());
  return kOk;
}

int cmd_plan(const moss::RunConfig& cfg, const std::string& command) {
  cfg.validate();
  const moss::Graph g = load(cfg.input);
  const moss::TotalOrder order(g);
  const moss::WeightIndex index(g, order);
  const auto plan = moss::plan_budgets(cfg, index);
  Json j = moss::to_json(moss::Provenance::of(command, g, cfg.seed, cfg.to_json()));
  j["plan"] = moss::to_json(plan);
  moss::write_text_output(cfg.output, dump(j));
  return kOk;
}

int cmd_catalog(const std::string& output) {
  const auto& cat = moss::catalog();
  Json j{{"tool", "moss"}, {"version", moss::kVersion}};
  auto list = [](const std::vector<moss::Motif>& motifs, int size) {
    Json arr = Json::array();
    for (const auto& m : motifs) {
      Json e{{"motif_id", m.id}, {"edge_list", m.shape.edge_list()}, {"edges", m.edges}, {"degrees", m.degrees},
             {"triangles", m.triangles}};
      if (size == 4)
        e["phi"] = {{"moss4", m.phi[0]}, {"moss4min", m.phi[1]}};
      else
        e["phi"] = {{"t5", m.phi[0]}, {"path5", m.phi[1]}, {"star4", m.phi[2]}};
      arr.push_back(e);
    }
    return arr;
  };
  j["motifs4"] = list(cat.motifs4(), 4);
  j["motifs5"] = list(cat.motifs5(), 5);
  moss::write_text_output(output, dump(j));
  return kOk;
}

void add_run_options(CLI::App* sub, moss::RunConfig& cfg, std::string& engine) {
  sub->add_option("--input", cfg.input, "Edge list file")->required();
  sub->add_option("--method", cfg.method, "moss4, moss4min, moss5, t5 or path5")
      ->check(CLI::IsMember({"moss4", "moss4min", "moss5", "t5", "path5"}));
  sub->add_option("--budget", cfg.budget, "Trials (K, K-check or K1)");
  sub->add_option("--budget2", cfg.budget2, "Path-5 trials for moss5 (default: --budget)");
  sub->add_option("--seed", cfg.seed, "Master seed");
  sub->add_option("--workers", cfg.workers, "Worker threads");
  sub->add_option("--output", cfg.output, "Output file (default stdout)");
  sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--level", cfg.level, "Confidence level");
  sub->add_option("--ground-truth", cfg.ground_truth, "Exact counts from the exact command");
  sub->add_option("--engine", engine, "direct or vertex")->check(CLI::IsMember({"direct", "vertex"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moss: graphlet counting by sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", moss::kVersion);

  moss::RunConfig cfg;
  std::string engine = "direct";
  std::string input, output, format = "json";
  int size = 4;
  double cap = 1e8;
  unsigned workers = 1;

  auto* stats = app.add_subcommand("stats", "Graph constants and method applicability");
  stats->add_option("--input", input, "Edge list file")->required();
  stats->add_option("--output", output, "Output file (default stdout)");

  auto* exact = app.add_subcommand("exact", "Exact motif counts by enumeration");
  exact->add_option("--input", input, "Edge list file")->required();
  exact->add_option("--size", size, "Motif size, 4 or 5")->check(CLI::IsMember({4, 5}));
  exact->add_option("--cap", cap, "Refuse when the projected CIS count exceeds this");
  exact->add_option("--workers", workers, "Worker threads");
  exact->add_option("--output", output, "Output file (default stdout)");
  exact->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* sample = app.add_subcommand("sample", "One estimation run");
  add_run_options(sample, cfg, engine);
  sample->add_option("--tape", cfg.tape, "Record (direct engine) or replay (vertex engine) decisions");

  auto* experiment = app.add_subcommand("experiment", "Repeated runs with error metrics");
  add_run_options(experiment, cfg, engine);
  experiment->add_option("--repeats", cfg.repeats, "Independent runs R");

  auto* plan = app.add_subcommand("plan", "Budget needed for a relative error bound");
  add_run_options(plan, cfg, engine);
  plan->add_option("--epsilon", cfg.epsilon, "Relative error");
  plan->add_option("--delta", cfg.delta, "Failure probability");
  plan->add_option("--pilot", cfg.pilot, "Pilot budget");
  plan->add_option("--motifs", cfg.motifs, "Motif ids (default: all directly sampled)");

  auto* catalog = app.add_subcommand("catalog", "Motif catalog with weights");
  catalog->add_option("--output", output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  cfg.engine = engine == "vertex" ? moss::Engine::kVertex : moss::Engine::kDirect;
  const std::string command = joined_args(argc, argv);

  try {
    if (*stats) return cmd_stats(input, output, command);
    if (*exact) return cmd_exact(input, size, cap, workers, format, output, command);
    if (*sample) return cmd_sample(cfg, command);
    if (*experiment) return cmd_experiment(cfg, command);
    if (*plan) return cmd_plan(cfg, command);
    if (*catalog) return cmd_catalog(output);
  } catch (const moss::InapplicableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInapplicable;
  } catch (const moss::ScaleCapError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kScaleCap;
  } catch (const moss::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const moss::TapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}
