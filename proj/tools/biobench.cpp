// biobench: generate synthetic cohorts, fit clustering algorithms, score
// them against planted truth and run benchmark grids.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "biobench/datagen.hpp"
#include "biobench/evalharness.hpp"
#include "biobench/sustain.hpp"

#ifndef BIOBENCH_VERSION
#define BIOBENCH_VERSION "dev"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace biobench;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

int effective_workers(int flag) {
  if (const char* env = std::getenv("BIOBENCH_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("BIOBENCH_WORKERS must be a positive integer, got '") + env + "'");
  }
  if (flag < 1) throw ConfigError("--workers must be positive");
  return flag;
}

// "90", "90s", "2m", "1h" -> seconds.
double parse_budget(const std::string& s) {
  if (s.empty()) throw ConfigError("empty budget");
  double scale = 1;
  std::string num = s;
  switch (s.back()) {
    case 's': num.pop_back(); break;
    case 'm': scale = 60; num.pop_back(); break;
    case 'h': scale = 3600; num.pop_back(); break;
    default: break;
  }
  try {
    const double v = parse_double(num) * scale;
    if (!(v >= 0)) throw ConfigError("");
    return v;
  } catch (const Error&) {
    throw ConfigError("invalid budget '" + s + "' (expected e.g. 60s, 2m)");
  }
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("invalid integer list '" + s + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text)) throw DataError("cannot write " + p.string());
}

fs::path prepare_out(const std::string& out) {
  if (out.empty()) throw ConfigError("--out is required");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw DataError("cannot create output directory " + out + ": " + ec.message());
  return fs::path(out);
}

// Everything needed to re-run the command, plus build details.
void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& argv, const json& config,
                    const json& seeds, const std::vector<std::string>& outputs) {
  json m{{"command", command},
         {"argv", argv},
         {"config", config},
         {"seeds", seeds},
         {"outputs", outputs},
         {"versions",
          {{"biobench", BIOBENCH_VERSION},
           {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION)},
           {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                 std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
           {"compiler", __VERSION__}}},
         {"created_at", utc_now()}};
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

datagen::LabeledDataset load_input(const std::string& data, const std::string& preset, std::optional<std::uint64_t> seed) {
  if (!data.empty() && !preset.empty()) throw ConfigError("give either --data or --preset, not both");
  if (!data.empty()) return datagen::load_dataset(data);
  if (preset.empty()) throw ConfigError("one of --data or --preset is required");
  if (!seed) throw ConfigError("--seed is required");
  return datagen::make_preset(preset, *seed);
}

json optional_config(const std::string& path) {
  if (path.empty()) return json::object();
  return eval::load_config_file(path);
}

std::string assignment_csv(const datagen::LabeledDataset& ds, const eval::FitOutput& fit) {
  std::ostringstream os;
  os << "participant_id,label";
  for (Eigen::Index j = 0; j < fit.scores.cols(); ++j) os << ",score_" << j + 1;
  os << '\n';
  const auto rows = ds.patient_rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << ds.participant_ids[rows[i]] << ',' << fit.labels[i];
    for (Eigen::Index j = 0; j < fit.scores.cols(); ++j) os << ',' << format_double(fit.scores(static_cast<Eigen::Index>(i), j));
    os << '\n';
  }
  return os.str();
}

// participant_id -> label
std::vector<std::pair<std::string, int>> read_assignment(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("participant_id,label", 0) != 0) throw DataError(p.string() + " is not an assignment file");
  std::vector<std::pair<std::string, int>> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = datagen::detail::split_csv_line(line);
    if (f.size() < 2) throw DataError("malformed assignment row: " + line);
    out.emplace_back(f[0], static_cast<int>(parse_double(f[1])));
  }
  return out;
}

} // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Benchmark harness for semi-supervised clustering of synthetic patient cohorts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BIOBENCH_VERSION);

  std::string out, preset, data, config, algorithm, model_path, assignment_path, input, vars = "3,5,8,12", budget = "60s";
  std::optional<std::uint64_t> seed;
  std::optional<int> k;
  int workers = 1, subjects = 200, em_iterations = 3;
  bool record_timing = false;

  auto* gen = app.add_subcommand("gen", "Write a preset dataset (CSV + truth sidecar)");
  gen->add_option("--preset", preset, "Preset name, e.g. syn1 or syn3-widespread-k2-equal")->required();
  gen->add_option("--seed", seed, "Master seed");
  gen->add_option("--out", out, "Output directory")->required();

  auto* fit = app.add_subcommand("fit", "Fit one algorithm on one dataset");
  fit->add_option("--algorithm", algorithm, "hydra | smilegan | surrealgan | sustain")->required();
  fit->add_option("--data", data, "Dataset CSV (truth sidecar optional)");
  fit->add_option("--preset", preset, "Generate this preset instead of reading --data");
  fit->add_option("--k", k, "Clusters / patterns / subtypes (default: planted K)");
  fit->add_option("--seed", seed, "Master seed");
  fit->add_option("--config", config, "TOML/JSON file with algorithm parameter overrides");
  fit->add_option("--workers", workers, "Worker threads");
  fit->add_option("--out", out, "Output directory")->required();

  auto* score = app.add_subcommand("score", "Score an assignment (and model) against ground truth");
  score->add_option("--assignment", assignment_path, "assignment.csv written by fit")->required();
  score->add_option("--data", data, "Dataset CSV with truth sidecar");
  score->add_option("--preset", preset, "Regenerate this preset (needs --seed)");
  score->add_option("--seed", seed, "Seed used to generate the preset");
  score->add_option("--model", model_path, "model.json written by fit, for the pattern score");
  score->add_option("--out", out, "Output directory")->required();

  auto* bench = app.add_subcommand("bench", "Run a benchmark grid and emit the report");
  bench->add_option("--config", config, "Grid config (TOML or JSON)")->required();
  bench->add_option("--workers", workers, "Worker threads (overrides the config)");
  bench->add_flag("--record-timing", record_timing, "Write wall time and memory into results.csv");
  bench->add_option("--out", out, "Output directory")->required();

  auto* probe = app.add_subcommand("probe-sustain", "Measure SuStaIn EM cost against the number of variables");
  probe->add_option("--vars", vars, "Comma-separated variable counts");
  probe->add_option("--budget", budget, "Wall-clock budget per variable count, e.g. 60s");
  probe->add_option("--subjects", subjects, "Simulated subjects");
  probe->add_option("--em-iterations", em_iterations, "EM iterations timed per count");
  probe->add_option("--seed", seed, "Seed (default 0)");
  probe->add_option("--out", out, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Re-emit the report from results.jsonl");
  report->add_option("--in", input, "results.jsonl")->required();
  report->add_flag("--record-timing", record_timing, "Write wall time and memory into results.csv");
  report->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      if (!seed) throw ConfigError("--seed is required");
      const auto ds = datagen::make_preset(preset, *seed);
      const fs::path dir = prepare_out(out);
      const std::string name = datagen::PresetId::parse(preset).name();
      const fs::path csv = dir / (name + ".csv");
      datagen::save_dataset(ds, csv);
      write_manifest(dir, "gen", args, {{"preset", name}}, {{"seed", *seed}},
                     {csv.filename().string(), datagen::sidecar_path(csv).filename().string()});
      std::cout << "wrote " << csv.string() << " (" << ds.data.rows() << " rows, " << ds.data.cols() << " variables)\n";
    } else if (fit->parsed()) {
      if (!seed) throw ConfigError("--seed is required");
      const auto algo = eval::parse_algorithm(algorithm);
      const json over = optional_config(config);
      const auto ds = load_input(data, preset, seed);
      int kk = 0;
      if (k) kk = *k;
      else if (ds.truth) kk = ds.truth->n_clusters();
      else throw ConfigError("--k is required for datasets without ground truth");
      const int w = effective_workers(workers);
      const fs::path dir = prepare_out(out);
      const auto res = eval::fit_algorithm(algo, ds, kk, *seed, over, w);
      write_file(dir / "model.json", json{{"algorithm", algorithm}, {"k", kk}, {"model", res.model}}.dump(2) + "\n");
      write_file(dir / "assignment.csv", assignment_csv(ds, res));
      std::vector<std::string> outputs{"model.json", "assignment.csv"};
      if (ds.truth) {
        json s{{"accuracy", eval::matched_accuracy(res.labels, ds.truth->labels).accuracy}};
        if (res.directions) s["pattern_score"] = eval::pattern_score(*res.directions, eval::truth_patterns(ds));
        write_file(dir / "score.json", s.dump(2) + "\n");
        outputs.push_back("score.json");
        std::cout << algorithm << " accuracy " << format_double(s["accuracy"].get<double>()) << '\n';
      }
      write_manifest(dir, "fit", args,
                     {{"algorithm", algorithm}, {"data", data}, {"preset", preset}, {"k", kk}, {"overrides", over}, {"workers", w}},
                     {{"seed", *seed}}, outputs);
    } else if (score->parsed()) {
      const auto ds = load_input(data, preset, seed);
      const auto& truth = ds.require_truth();
      const auto assigned = read_assignment(assignment_path);
      const auto rows = ds.patient_rows();
      if (assigned.size() != rows.size()) throw DataError("assignment has " + std::to_string(assigned.size()) + " rows for " +
                                                          std::to_string(rows.size()) + " patients");
      std::vector<int> labels;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (assigned[i].first != ds.participant_ids[rows[i]])
          throw DataError("assignment row " + std::to_string(i + 1) + " is for '" + assigned[i].first + "', expected '" +
                          ds.participant_ids[rows[i]] + "'");
        labels.push_back(assigned[i].second);
      }
      const auto m = eval::matched_accuracy(labels, truth.labels);
      json s{{"accuracy", m.accuracy}, {"n", labels.size()}};
      json perm = json::object();
      for (const auto& [p, t] : m.permutation) perm[std::to_string(p)] = t;
      s["permutation"] = perm;
      std::vector<std::vector<double>> conf(m.confusion.rows());
      for (Eigen::Index i = 0; i < m.confusion.rows(); ++i)
        for (Eigen::Index j = 0; j < m.confusion.cols(); ++j) conf[i].push_back(m.confusion(i, j));
      s["confusion"] = conf;
      if (!model_path.empty()) {
        const json doc = datagen::detail::read_json_file(model_path);
        const json& mj = doc.at("model");
        const auto z = datagen::z_split(ds);
        std::optional<Matrix> dirs;
        if (mj.value("model", "") == "smilegan") dirs = gan::pattern_directions(gan::load_smile(mj), z.controls);
        else if (mj.value("model", "") == "surrealgan") {
          const auto sm = gan::load_surreal(mj);
          dirs = gan::pattern_directions(sm, z.controls);
          const auto gap = eval::rindex_cluster_gap(sm, ds, 0);
          s["rindex_kmeans_accuracy"] = gap.individual_accuracy;
        }
        if (dirs) s["pattern_score"] = eval::pattern_score(*dirs, eval::truth_patterns(ds));
      }
      const fs::path dir = prepare_out(out);
      write_file(dir / "score.json", s.dump(2) + "\n");
      write_manifest(dir, "score", args, {{"assignment", assignment_path}, {"data", data}, {"preset", preset}, {"model", model_path}},
                     seed ? json{{"seed", *seed}} : json::object(), {"score.json"});
      std::cout << "accuracy " << format_double(m.accuracy) << '\n';
    } else if (bench->parsed()) {
      json cj = eval::load_config_file(config);
      auto grid = eval::grid_config_from_json(cj);
      if (bench->count("--workers") || std::getenv("BIOBENCH_WORKERS")) grid.workers = effective_workers(workers);
      if (record_timing) grid.record_timing = true;
      const fs::path dir = prepare_out(out);
      const auto recs = eval::run_grid(grid);
      const auto rep = eval::emit_report(recs, dir, grid.record_timing);
      std::vector<std::string> outputs;
      for (const auto& f : rep.files) outputs.push_back(f.filename().string());
      write_manifest(dir, "bench", args, cj, grid.seeds, outputs);
      int ok = 0;
      for (const auto& r : recs) ok += r.status == eval::Status::ok;
      std::cout << recs.size() << " cells, " << ok << " ok; report in " << dir.string() << '\n';
    } else if (probe->parsed()) {
      sustain::ProbeConfig pc;
      pc.budget_seconds = parse_budget(budget);
      pc.n_subjects = subjects;
      pc.em_iterations = em_iterations;
      pc.seed = seed.value_or(0);
      if (subjects < 1 || em_iterations < 1) throw ConfigError("--subjects and --em-iterations must be positive");
      const auto counts = parse_int_list(vars);
      const fs::path dir = prepare_out(out);
      const auto rows = sustain::scaling_probe(counts, pc);
      std::ostringstream os;
      sustain::write_probe_csv(os, rows);
      write_file(dir / "sustain_probe.csv", os.str());
      write_manifest(dir, "probe-sustain", args,
                     {{"vars", counts}, {"budget_seconds", pc.budget_seconds}, {"subjects", subjects}, {"em_iterations", em_iterations}},
                     {{"seed", pc.seed}}, {"sustain_probe.csv"});
      std::cout << os.str();
    } else if (report->parsed()) {
      std::ifstream in(input);
      if (!in) throw DataError("cannot open " + input);
      const auto recs = eval::read_jsonl(in);
      const fs::path dir = prepare_out(out);
      const auto rep = eval::emit_report(recs, dir, record_timing);
      std::vector<std::string> outputs;
      for (const auto& f : rep.files) outputs.push_back(f.filename().string());
      write_manifest(dir, "report", args, {{"in", input}, {"record_timing", record_timing}}, json::object(), outputs);
      std::cout << recs.size() << " records; report in " << dir.string() << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
