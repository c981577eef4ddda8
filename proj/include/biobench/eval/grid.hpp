#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "biobench/core/deadline.hpp"
#include "biobench/core/error.hpp"
#include "biobench/core/parallel.hpp"
#include "biobench/datagen/io.hpp"
#include "biobench/datagen/presets.hpp"
#include "biobench/eval/algorithms.hpp"
#include "biobench/eval/matching.hpp"

namespace biobench::eval {

inline constexpr int kRecordSchemaVersion = 1;

enum class Status { ok, timeout, failed };
NLOHMANN_JSON_SERIALIZE_ENUM(Status, {{Status::ok, "ok"}, {Status::timeout, "timeout"}, {Status::failed, "failed"}})

inline std::string_view status_name(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::timeout: return "timeout";
    case Status::failed: return "failed";
  }
  return "?";
}

inline Status parse_status(std::string_view s) {
  for (Status st : {Status::ok, Status::timeout, Status::failed})
    if (status_name(st) == s) return st;
  throw DataError("unknown status '" + std::string(s) + "'");
}

struct BenchmarkRecord {
  std::string algorithm;
  std::string preset;  // family, e.g. "syn3", or the file stem of a CSV dataset
  std::string variant; // e.g. "widespread-equal", "base"
  int k = 0;
  std::uint64_t seed = 0;
  std::optional<double> accuracy;
  std::optional<double> pattern_score;
  double wall_ms = 0;
  long long peak_mem_bytes = 0;
  Status status = Status::ok;
  std::string message; // failure reason, jsonl only

  std::string axis() const { return preset + "/" + variant + "/" + std::to_string(k); }

  void validate() const {
    if (status == Status::ok && !accuracy) throw DataError("record with status ok lacks an accuracy");
    if (wall_ms < 0 || peak_mem_bytes < 0) throw DataError("record times and memory must be non-negative");
  }

  friend bool operator==(const BenchmarkRecord&, const BenchmarkRecord&) = default;
};

inline void to_json(nlohmann::json& j, const BenchmarkRecord& r) {
  j = {{"schema_version", kRecordSchemaVersion},
       {"algorithm", r.algorithm},
       {"preset", r.preset},
       {"variant", r.variant},
       {"k", r.k},
       {"seed", r.seed},
       {"accuracy", r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json()},
       {"pattern_score", r.pattern_score ? nlohmann::json(*r.pattern_score) : nlohmann::json()},
       {"wall_ms", r.wall_ms},
       {"peak_mem_bytes", r.peak_mem_bytes},
       {"status", r.status}};
  if (!r.message.empty()) j["message"] = r.message;
}

inline void from_json(const nlohmann::json& j, BenchmarkRecord& r) {
  const int v = j.value("schema_version", 0);
  if (v != kRecordSchemaVersion) throw DataError("unsupported record schema version " + std::to_string(v));
  j.at("algorithm").get_to(r.algorithm);
  j.at("preset").get_to(r.preset);
  j.at("variant").get_to(r.variant);
  j.at("k").get_to(r.k);
  j.at("seed").get_to(r.seed);
  r.accuracy = j.at("accuracy").is_null() ? std::nullopt : std::optional<double>(j.at("accuracy").get<double>());
  r.pattern_score = j.at("pattern_score").is_null() ? std::nullopt : std::optional<double>(j.at("pattern_score").get<double>());
  j.at("wall_ms").get_to(r.wall_ms);
  j.at("peak_mem_bytes").get_to(r.peak_mem_bytes);
  j.at("status").get_to(r.status);
  r.message = j.value("message", std::string());
}

// Process high-water resident set size (VmHWM), 0 where unavailable.
inline long long peak_memory_bytes() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream ss(line.substr(6));
      long long kb = 0;
      ss >> kb;
      return kb * 1024;
    }
  return 0;
}

struct DatasetSpec {
  std::string name;                     // preset name or CSV path
  std::optional<datagen::PresetId> preset;
};

struct GridConfig {
  std::vector<Algorithm> algorithms;
  std::vector<DatasetSpec> datasets;
  std::vector<std::uint64_t> seeds;
  double budget_seconds = 600; // per cell
  int workers = 1;
  bool record_timing = false;
  nlohmann::json params = nlohmann::json::object(); // per-algorithm overrides

  void validate() const {
    if (algorithms.empty()) throw ConfigError("grid needs at least one algorithm");
    if (datasets.empty()) throw ConfigError("grid needs at least one dataset");
    if (seeds.empty()) throw ConfigError("grid needs at least one seed");
    if (!(budget_seconds >= 0)) throw ConfigError("budget_seconds must be non-negative");
    if (workers < 1) throw ConfigError("workers must be positive");
    for (const auto& [key, value] : params.items()) {
      const Algorithm a = parse_algorithm(key);
      // Surface unknown keys before any cell runs.
      if (a == Algorithm::hydra) with_overrides(hydra::HydraConfig{}, value, key);
      else if (a == Algorithm::sustain) with_overrides(sustain::SustainConfig{}, value, key);
      else with_overrides(gan::TrainConfig{}, value, key).validate();
    }
  }
};

inline DatasetSpec dataset_spec(const std::string& name) {
  DatasetSpec d{name, std::nullopt};
  const bool is_file = name.size() > 4 && name.substr(name.size() - 4) == ".csv";
  if (!is_file) d.preset = datagen::PresetId::parse(name);
  return d;
}

// Grid config from a parsed TOML/JSON document:
//   algorithms = [...]; datasets = [...]; seeds = [...]; budget_seconds; workers;
//   record_timing; [sweep] families/variants/ks/balances; [params.<algorithm>] overrides.
inline GridConfig grid_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("grid config must be a table");
  static const std::vector<std::string> known{"algorithms", "datasets", "seeds", "budget_seconds", "workers", "record_timing", "sweep",
                                              "params"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
  GridConfig g;
  try {
    for (const auto& a : j.at("algorithms")) g.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    if (j.contains("datasets"))
      for (const auto& d : j.at("datasets")) g.datasets.push_back(dataset_spec(d.get<std::string>()));
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      const auto families = s.at("families").get<std::vector<std::string>>();
      const auto variants = s.value("variants", std::vector<std::string>{"widespread"});
      const auto ks = s.value("ks", std::vector<int>{3});
      const auto balances = s.value("balances", std::vector<std::string>{"equal"});
      for (const auto& f : families)
        for (const auto& v : variants)
          for (int k : ks)
            for (const auto& b : balances) {
              if (b != "equal" && b != "unequal") throw ConfigError("balance must be 'equal' or 'unequal'");
              const auto id = datagen::PresetId::make(f, v, k, b == "equal");
              const std::string name = id.name();
              if (std::none_of(g.datasets.begin(), g.datasets.end(), [&](const DatasetSpec& d) { return d.name == name; }))
                g.datasets.push_back({name, id});
            }
    }
    if (!j.contains("seeds")) throw ConfigError("config must list seeds (no implicit randomness)");
    g.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    g.budget_seconds = j.value("budget_seconds", g.budget_seconds);
    g.workers = j.value("workers", g.workers);
    g.record_timing = j.value("record_timing", g.record_timing);
    g.params = j.value("params", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid config: ") + e.what());
  }
  g.validate();
  return g;
}

namespace detail {

inline datagen::LabeledDataset load_cell_dataset(const DatasetSpec& d, std::uint64_t seed) {
  if (d.preset) return datagen::make_preset(*d.preset, seed);
  return datagen::load_dataset(d.name);
}

inline void describe(const DatasetSpec& d, const datagen::LabeledDataset& ds, BenchmarkRecord& r) {
  if (d.preset) {
    r.preset = d.preset->family_str();
    r.variant = d.preset->variant_str();
    r.k = d.preset->k;
    if (!d.preset->is_morphometric()) r.k = ds.truth ? ds.truth->n_clusters() : 3;
  } else {
    r.preset = std::filesystem::path(d.name).stem().string();
    r.variant = "external";
    r.k = ds.truth ? ds.truth->n_clusters() : 0;
  }
}

} // namespace detail

// One cell: fit under a wall-clock budget and score against ground truth.
// Errors become record statuses; nothing escapes.
inline BenchmarkRecord run_cell(Algorithm a, const DatasetSpec& d, const datagen::LabeledDataset& ds, std::uint64_t seed,
                                const GridConfig& cfg) {
  BenchmarkRecord r;
  r.algorithm = std::string(algorithm_name(a));
  r.seed = seed;
  detail::describe(d, ds, r);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Deadline deadline = Deadline::after(cfg.budget_seconds);
    deadline.check();
    const auto& truth = ds.require_truth();
    const nlohmann::json over = cfg.params.value(std::string(algorithm_name(a)), nlohmann::json::object());
    const FitOutput fit = fit_algorithm(a, ds, r.k, derive_seed(seed, stream::algorithm), over, 1, deadline);
    r.accuracy = matched_accuracy(fit.labels, truth.labels).accuracy;
    if (fit.directions) r.pattern_score = pattern_score(*fit.directions, truth_patterns(ds));
    r.status = Status::ok;
  } catch (const Cancelled&) {
    r.status = Status::timeout;
    r.message = "wall-clock budget exhausted";
  } catch (const std::exception& e) {
    r.status = Status::failed;
    r.message = e.what();
    r.accuracy.reset();
    r.pattern_score.reset();
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  r.peak_mem_bytes = peak_memory_bytes();
  return r;
}

// Every (algorithm x dataset x seed) cell, in that nesting order. Datasets are
// generated once per (dataset, seed) up front; cells then run on the worker
// pool and are written back by index, so output order never depends on
// scheduling.
inline std::vector<BenchmarkRecord> run_grid(const GridConfig& cfg) {
  cfg.validate();
  const std::size_t nd = cfg.datasets.size(), ns = cfg.seeds.size();
  std::vector<std::optional<datagen::LabeledDataset>> data(nd * ns);
  std::vector<std::string> load_error(nd * ns);
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t s = 0; s < ns; ++s) {
      try {
        data[d * ns + s] = detail::load_cell_dataset(cfg.datasets[d], cfg.seeds[s]);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        load_error[d * ns + s] = e.what();
      }
    }

  const std::size_t cells = cfg.algorithms.size() * nd * ns;
  std::vector<BenchmarkRecord> out(cells);
  parallel_for(cells, cfg.workers, [&](std::size_t c) {
    const std::size_t a = c / (nd * ns), d = (c / ns) % nd, s = c % ns;
    if (!data[d * ns + s]) {
      BenchmarkRecord r;
      r.algorithm = std::string(algorithm_name(cfg.algorithms[a]));
      r.preset = std::filesystem::path(cfg.datasets[d].name).stem().string();
      r.variant = "external";
      r.seed = cfg.seeds[s];
      r.status = Status::failed;
      r.message = load_error[d * ns + s];
      out[c] = std::move(r);
      return;
    }
    out[c] = run_cell(cfg.algorithms[a], cfg.datasets[d], *data[d * ns + s], cfg.seeds[s], cfg);
  });
  return out;
}

} // namespace biobench::eval
