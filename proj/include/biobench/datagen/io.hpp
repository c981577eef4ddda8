#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"
#include "biobench/datagen/types.hpp"

namespace biobench::datagen {

namespace fs = std::filesystem;

// "cohort.csv" -> "cohort.truth.json"
inline fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".truth.json");
  return p;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline nlohmann::json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed JSON in " + p.string() + ": " + e.what());
  }
}

} // namespace detail

// Header `participant_id,role,<variables...>`, one row per participant.
inline void write_dataset_csv(const LabeledDataset& ds, std::ostream& os) {
  os << "participant_id,role";
  for (const auto& n : ds.data.variable_names) os << ',' << n;
  os << '\n';
  for (Eigen::Index i = 0; i < ds.data.rows(); ++i) {
    os << ds.participant_ids[i] << ',' << (ds.roles[i] == Role::control ? "control" : "patient");
    for (Eigen::Index j = 0; j < ds.data.cols(); ++j) os << ',' << format_double(ds.data.values(i, j));
    os << '\n';
  }
}

inline nlohmann::json truth_sidecar(const LabeledDataset& ds) {
  nlohmann::json j;
  j["schema_version"] = ds.provenance.schema_version;
  j["preset"] = ds.provenance.preset;
  j["config"] = ds.provenance.config ? nlohmann::json(*ds.provenance.config) : nlohmann::json(nullptr);
  j["note"] = ds.provenance.note;
  j["families"] = ds.data.family;
  if (!ds.truth) {
    j["labels"] = nullptr;
    return j;
  }
  const auto& t = *ds.truth;
  const auto& names = ds.data.variable_names;
  j["labels"] = t.labels;
  nlohmann::json affected = nlohmann::json::object(), directions = nlohmann::json::object();
  for (int c = 0; c < t.n_clusters(); ++c) {
    const std::string key = std::to_string(c + 1);
    nlohmann::json vars = nlohmann::json::array(), dirs = nlohmann::json::object();
    for (std::size_t v = 0; v < t.affected[c].size(); ++v) {
      vars.push_back(names[t.affected[c][v]]);
      dirs[names[t.affected[c][v]]] = t.direction[c][v];
    }
    affected[key] = vars;
    directions[key] = dirs;
  }
  j["affected"] = affected;
  j["directions"] = directions;
  nlohmann::json sev = nlohmann::json::array();
  for (Eigen::Index i = 0; i < t.severity.rows(); ++i)
    sev.push_back({t.severity(i, 0), t.severity(i, 1), t.severity(i, 2)});
  j["severity"] = sev;
  return j;
}

inline void save_dataset(const LabeledDataset& ds, const fs::path& csv) {
  ds.validate();
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw Error("cannot write " + csv.string());
    write_dataset_csv(ds, out);
  }
  std::ofstream side(sidecar_path(csv), std::ios::binary);
  if (!side) throw Error("cannot write " + sidecar_path(csv).string());
  side << truth_sidecar(ds).dump(1) << '\n';
}

inline LabeledDataset read_dataset_csv(std::istream& in, const std::string& source = "dataset") {
  LabeledDataset ds;
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  const auto header = detail::split_csv_line(line);
  if (header.size() < 3 || header[0] != "participant_id" || header[1] != "role")
    throw DataError(source + ": header must start with participant_id,role and name at least one variable");
  std::set<std::string> seen;
  for (std::size_t c = 2; c < header.size(); ++c) {
    if (header[c].empty()) throw DataError(source + ": empty variable name in column " + std::to_string(c + 1));
    if (!seen.insert(header[c]).second) throw DataError(source + ": duplicate variable name '" + header[c] + "'");
    ds.data.variable_names.push_back(header[c]);
  }
  const std::size_t n_vars = ds.data.variable_names.size();
  ds.data.family.assign(n_vars, Family::generic);

  std::vector<double> cells;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != n_vars + 2)
      throw DataError(source + ": line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(n_vars + 2));
    ds.participant_ids.push_back(fields[0]);
    if (fields[1] == "control")
      ds.roles.push_back(Role::control);
    else if (fields[1] == "patient")
      ds.roles.push_back(Role::patient);
    else
      throw DataError(source + ": line " + std::to_string(line_no) + " has unknown role '" + fields[1] + "'");
    for (std::size_t c = 2; c < fields.size(); ++c) {
      double v = 0;
      try {
        v = parse_double(fields[c]);
      } catch (const DataError&) {
        throw DataError(source + ": line " + std::to_string(line_no) + ", column '" + header[c] +
                        "' is not a number");
      }
      if (!std::isfinite(v))
        throw DataError(source + ": non-finite value at line " + std::to_string(line_no) + ", column '" + header[c] + "'");
      cells.push_back(v);
    }
  }
  const auto n_rows = static_cast<Eigen::Index>(ds.roles.size());
  ds.data.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      cells.data(), n_rows, static_cast<Eigen::Index>(n_vars));
  ds.provenance.preset = "external";
  return ds;
}

inline void apply_sidecar(LabeledDataset& ds, const nlohmann::json& j, const std::string& source) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion)
      throw DataError(source + ": schema version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kSchemaVersion) + ")");
    ds.provenance.schema_version = version;
    ds.provenance.preset = j.at("preset").get<std::string>();
    if (j.contains("config") && !j["config"].is_null()) ds.provenance.config = j["config"].get<SynthConfig>();
    ds.provenance.note = j.value("note", "");
    if (j.contains("families")) {
      auto fam = j["families"].get<std::vector<Family>>();
      if (fam.size() != ds.data.variable_names.size()) throw DataError(source + ": family list length mismatch");
      ds.data.family = std::move(fam);
    }
    if (!j.contains("labels") || j["labels"].is_null()) return;

    std::map<std::string, int> index;
    for (std::size_t v = 0; v < ds.data.variable_names.size(); ++v) index[ds.data.variable_names[v]] = static_cast<int>(v);
    auto lookup = [&](const std::string& name) {
      auto it = index.find(name);
      if (it == index.end()) throw DataError(source + ": ground truth names unknown variable '" + name + "'");
      return it->second;
    };

    GroundTruth t;
    t.labels = j["labels"].get<std::vector<int>>();
    const auto& affected = j.at("affected");
    const auto& directions = j.at("directions");
    const int k = static_cast<int>(affected.size());
    t.affected.resize(k);
    t.direction.resize(k);
    for (int c = 0; c < k; ++c) {
      const std::string key = std::to_string(c + 1);
      const auto& dirs = directions.at(key);
      for (const auto& name : affected.at(key)) {
        const auto n = name.get<std::string>();
        t.affected[c].push_back(lookup(n));
        t.direction[c].push_back(dirs.at(n).get<int>());
      }
    }
    const auto& sev = j.at("severity");
    t.severity.resize(static_cast<Eigen::Index>(sev.size()), 3);
    for (std::size_t i = 0; i < sev.size(); ++i) {
      if (sev[i].size() != 3) throw DataError(source + ": severity rows must have 3 components");
      for (int s = 0; s < 3; ++s) t.severity(static_cast<Eigen::Index>(i), s) = sev[i][s].get<double>();
    }
    ds.truth = std::move(t);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(source + ": malformed ground-truth sidecar: " + e.what());
  }
}

// Loads a dataset CSV and, when present, its ground-truth sidecar. A missing
// sidecar yields a dataset with no truth: usable for fitting, not scoring.
inline LabeledDataset load_dataset(const fs::path& csv) {
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw DataError("cannot open " + csv.string());
  LabeledDataset ds = read_dataset_csv(in, csv.string());
  const fs::path side = sidecar_path(csv);
  if (fs::exists(side)) apply_sidecar(ds, detail::read_json_file(side), side.string());
  ds.validate();
  return ds;
}

} // namespace biobench::datagen
