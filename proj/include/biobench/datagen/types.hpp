#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"
#include "biobench/datagen/surrogate_table.hpp"

namespace biobench::datagen {

inline constexpr int kSchemaVersion = 1;

NLOHMANN_JSON_SERIALIZE_ENUM(Family, {{Family::volume, "volume"},
                                      {Family::thickness, "thickness"},
                                      {Family::area, "area"},
                                      {Family::generic, "generic"}})

// Severity component that scales a variable of the given measure family.
inline int severity_component(Family f) {
  switch (f) {
    case Family::thickness: return 1;
    case Family::area: return 2;
    default: return 0;
  }
}

// Participants x named variables.
struct CohortMatrix {
  std::vector<std::string> variable_names;
  Matrix values;
  std::vector<Family> family;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  void validate() const {
    if (static_cast<Eigen::Index>(variable_names.size()) != values.cols())
      throw DataError("variable name count does not match column count");
    if (family.size() != variable_names.size())
      throw DataError("family tag count does not match column count");
    std::set<std::string> seen;
    for (const auto& n : variable_names)
      if (!seen.insert(n).second) throw DataError("duplicate variable name '" + n + "'");
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      for (Eigen::Index i = 0; i < values.rows(); ++i)
        if (!std::isfinite(values(i, j)))
          throw DataError("non-finite value in column '" + variable_names[j] + "', row " + std::to_string(i));
  }

  // Rows selected in the given order.
  CohortMatrix subset(const std::vector<int>& rows_idx) const {
    CohortMatrix out{variable_names, Matrix(rows_idx.size(), values.cols()), family};
    for (std::size_t r = 0; r < rows_idx.size(); ++r) out.values.row(r) = values.row(rows_idx[r]);
    return out;
  }

  friend bool operator==(const CohortMatrix& a, const CohortMatrix& b) {
    return a.variable_names == b.variable_names && a.family == b.family && a.values.rows() == b.values.rows() &&
           a.values.cols() == b.values.cols() && (a.values.array() == b.values.array()).all();
  }
};

enum class Direction { increase, decrease, mixed };
enum class ReferenceProfile { unit_normal, surrogate_morphometry, external_csv };
// `fixed` pins every severity component to 1 (used by the syn1/syn2 scheme).
enum class SeverityMode { uniform, fixed };

NLOHMANN_JSON_SERIALIZE_ENUM(Direction, {{Direction::increase, "increase"},
                                         {Direction::decrease, "decrease"},
                                         {Direction::mixed, "mixed"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ReferenceProfile, {{ReferenceProfile::unit_normal, "unit_normal"},
                                                {ReferenceProfile::surrogate_morphometry, "surrogate_morphometry"},
                                                {ReferenceProfile::external_csv, "external_csv"}})
NLOHMANN_JSON_SERIALIZE_ENUM(SeverityMode, {{SeverityMode::uniform, "uniform"}, {SeverityMode::fixed, "fixed"}})

struct SynthConfig {
  int n_controls = 0;
  int n_patients = 0;
  int n_variables = 0;
  int n_clusters = 2;
  std::vector<int> cluster_sizes;
  Direction direction_mode = Direction::increase;
  double sigma = 0.05;
  double alpha = 0.3;
  int vars_per_cluster = 21;
  int overlap_count = 6;
  ReferenceProfile reference_profile = ReferenceProfile::surrogate_morphometry;
  std::uint64_t seed = 0;
  SeverityMode severity_mode = SeverityMode::uniform;

  void validate() const {
    if (n_clusters < 1) throw ConfigError("n_clusters must be >= 1");
    if (static_cast<int>(cluster_sizes.size()) != n_clusters)
      throw ConfigError("cluster_sizes must list one size per cluster");
    long total = 0;
    for (int s : cluster_sizes) {
      if (s < 0) throw ConfigError("cluster sizes must be nonnegative");
      total += s;
    }
    if (total != n_patients)
      throw ConfigError("cluster_sizes sum to " + std::to_string(total) + " but n_patients is " +
                        std::to_string(n_patients));
    if (vars_per_cluster < 0 || vars_per_cluster > n_variables)
      throw ConfigError("vars_per_cluster must lie in [0, n_variables]");
    if (overlap_count < 0 || overlap_count > vars_per_cluster)
      throw ConfigError("overlap_count must lie in [0, vars_per_cluster]");
    const long needed = overlap_count + static_cast<long>(n_clusters) * (vars_per_cluster - overlap_count);
    if (needed > n_variables)
      throw ConfigError("overlap layout needs " + std::to_string(needed) + " variables but only " +
                        std::to_string(n_variables) + " exist");
    if (!(sigma >= 0) || !(alpha >= 0)) throw ConfigError("sigma and alpha must be nonnegative");
  }

  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

inline void to_json(nlohmann::json& j, const SynthConfig& c) {
  j = nlohmann::json{{"n_controls", c.n_controls},
                     {"n_patients", c.n_patients},
                     {"n_variables", c.n_variables},
                     {"n_clusters", c.n_clusters},
                     {"cluster_sizes", c.cluster_sizes},
                     {"direction_mode", c.direction_mode},
                     {"sigma", c.sigma},
                     {"alpha", c.alpha},
                     {"vars_per_cluster", c.vars_per_cluster},
                     {"overlap_count", c.overlap_count},
                     {"reference_profile", c.reference_profile},
                     {"seed", c.seed},
                     {"severity_mode", c.severity_mode}};
}

inline void from_json(const nlohmann::json& j, SynthConfig& c) {
  j.at("n_controls").get_to(c.n_controls);
  j.at("n_patients").get_to(c.n_patients);
  j.at("n_variables").get_to(c.n_variables);
  j.at("n_clusters").get_to(c.n_clusters);
  j.at("cluster_sizes").get_to(c.cluster_sizes);
  j.at("direction_mode").get_to(c.direction_mode);
  j.at("sigma").get_to(c.sigma);
  j.at("alpha").get_to(c.alpha);
  j.at("vars_per_cluster").get_to(c.vars_per_cluster);
  j.at("overlap_count").get_to(c.overlap_count);
  j.at("reference_profile").get_to(c.reference_profile);
  j.at("seed").get_to(c.seed);
  c.severity_mode = j.value("severity_mode", SeverityMode::uniform);
}

// Planted structure of the patient rows. Labels are 1-based cluster ids;
// `affected[k]` lists the 0-based variable indices perturbed in cluster k+1
// and `direction[k][n]` is the sign applied to `affected[k][n]`.
struct GroundTruth {
  std::vector<int> labels;
  std::vector<std::vector<int>> affected;
  std::vector<std::vector<int>> direction;
  Matrix severity; // n_patients x 3

  int n_clusters() const { return static_cast<int>(affected.size()); }

  void validate(int n_patients) const {
    if (static_cast<int>(labels.size()) != n_patients)
      throw DataError("ground truth has " + std::to_string(labels.size()) + " labels for " +
                      std::to_string(n_patients) + " patients");
    const int k = n_clusters();
    for (int l : labels)
      if (l < 1 || l > k) throw DataError("ground-truth label " + std::to_string(l) + " outside 1.." + std::to_string(k));
    if (direction.size() != affected.size()) throw DataError("direction table does not match affected sets");
    for (std::size_t c = 0; c < affected.size(); ++c) {
      if (direction[c].size() != affected[c].size()) throw DataError("direction table does not match affected sets");
      for (int d : direction[c])
        if (d != 1 && d != -1) throw DataError("directions must be +1 or -1");
    }
    if (severity.rows() != n_patients || severity.cols() != 3) throw DataError("severity must be n_patients x 3");
    if ((severity.array() < 0.0).any() || (severity.array() > 1.0).any())
      throw DataError("severity components must lie in [0, 1]");
  }

  friend bool operator==(const GroundTruth& a, const GroundTruth& b) {
    return a.labels == b.labels && a.affected == b.affected && a.direction == b.direction &&
           a.severity.rows() == b.severity.rows() && a.severity.cols() == b.severity.cols() &&
           (a.severity.array() == b.severity.array()).all();
  }
};

enum class Role { control, patient };
NLOHMANN_JSON_SERIALIZE_ENUM(Role, {{Role::control, "control"}, {Role::patient, "patient"}})

struct Provenance {
  std::string preset = "custom";
  std::optional<SynthConfig> config;
  int schema_version = kSchemaVersion;
  std::string note;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct LabeledDataset {
  CohortMatrix data;
  std::vector<std::string> participant_ids;
  std::vector<Role> roles;
  std::optional<GroundTruth> truth; // patients only, in row order
  Provenance provenance;

  std::vector<int> rows_with(Role r) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < roles.size(); ++i)
      if (roles[i] == r) out.push_back(static_cast<int>(i));
    return out;
  }
  std::vector<int> control_rows() const { return rows_with(Role::control); }
  std::vector<int> patient_rows() const { return rows_with(Role::patient); }
  int n_patients() const { return static_cast<int>(patient_rows().size()); }

  Matrix controls() const { return data.subset(control_rows()).values; }
  Matrix patients() const { return data.subset(patient_rows()).values; }

  // Ground truth or a DataError when the dataset cannot be scored.
  const GroundTruth& require_truth() const {
    if (!truth) throw DataError("dataset has no ground truth; it can be fitted but not scored");
    return *truth;
  }

  void validate() const {
    data.validate();
    if (static_cast<Eigen::Index>(roles.size()) != data.rows()) throw DataError("role count does not match row count");
    if (participant_ids.size() != roles.size()) throw DataError("participant id count does not match row count");
    if (truth) truth->validate(n_patients());
  }

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

} // namespace biobench::datagen
