#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "biobench/core/error.hpp"
#include "biobench/core/rng.hpp"
#include "biobench/datagen/types.hpp"

namespace biobench::datagen {

// Draws a healthy reference cohort. Each row uses its own RNG stream so the
// output does not depend on generation order.
inline CohortMatrix generate_reference(ReferenceProfile profile, int n_rows, int n_vars, std::uint64_t seed) {
  if (n_rows < 1 || n_vars < 1) throw ConfigError("reference cohort needs at least one row and one variable");

  CohortMatrix out;
  out.values.resize(n_rows, n_vars);
  std::vector<double> mean(n_vars), sd(n_vars);

  switch (profile) {
    case ReferenceProfile::unit_normal:
      for (int j = 0; j < n_vars; ++j) {
        out.variable_names.push_back("var" + std::to_string(j + 1));
        out.family.push_back(Family::generic);
        mean[j] = 1.0;
        sd[j] = 0.1;
      }
      break;
    case ReferenceProfile::surrogate_morphometry:
      if (n_vars != static_cast<int>(kSurrogateMorphometry.size()))
        throw ConfigError("surrogate_morphometry profile has exactly 150 variables, requested " + std::to_string(n_vars));
      for (int j = 0; j < n_vars; ++j) {
        const auto& e = kSurrogateMorphometry[j];
        out.variable_names.emplace_back(e.name);
        out.family.push_back(e.family);
        mean[j] = e.mean;
        sd[j] = e.sd;
      }
      break;
    default:
      throw ConfigError("reference profile cannot be generated; external cohorts are loaded from CSV");
  }

  for (int i = 0; i < n_rows; ++i) {
    Rng rng = make_rng(seed, stream::reference, i);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int j = 0; j < n_vars; ++j) out.values(i, j) = mean[j] + sd[j] * z(rng);
  }
  return out;
}

// Sizes for `n` patients split into `k` clusters. Unequal splits follow the
// ratio k : k-1 : ... : 1 with largest-remainder rounding.
inline std::vector<int> cluster_sizes(int n, int k, bool equal) {
  if (k < 1) throw ConfigError("cluster count must be >= 1");
  std::vector<double> weight(k);
  for (int c = 0; c < k; ++c) weight[c] = equal ? 1.0 : static_cast<double>(k - c);
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);

  std::vector<int> sizes(k);
  std::vector<std::pair<double, int>> remainder;
  int assigned = 0;
  for (int c = 0; c < k; ++c) {
    const double exact = n * weight[c] / total;
    sizes[c] = static_cast<int>(std::floor(exact));
    assigned += sizes[c];
    remainder.emplace_back(exact - sizes[c], c);
  }
  std::stable_sort(remainder.begin(), remainder.end(), [](auto a, auto b) { return a.first > b.first; });
  for (int r = 0; assigned < n; ++r, ++assigned) ++sizes[remainder[r].second];
  return sizes;
}

// Perturbs patient rows according to `cfg`. The result holds only patient
// rows; combine with controls via assemble().
//
// For patient i in cluster k and affected variable j:
//   tv_ij = v_ij + d_kj * v_ij * s_ik[family(j)] * eta_ij * alpha
// with eta_ij = max(0, Normal(1, sigma)). Unaffected cells are copied as-is.
inline LabeledDataset plant_clusters(const CohortMatrix& base_patients, const SynthConfig& cfg) {
  cfg.validate();
  base_patients.validate();
  if (base_patients.rows() != cfg.n_patients)
    throw ConfigError("base cohort has " + std::to_string(base_patients.rows()) + " rows but n_patients is " +
                      std::to_string(cfg.n_patients));
  if (base_patients.cols() != cfg.n_variables)
    throw ConfigError("base cohort has " + std::to_string(base_patients.cols()) + " variables but n_variables is " +
                      std::to_string(cfg.n_variables));

  const int k = cfg.n_clusters;
  const int n = cfg.n_patients;
  Rng layout = make_rng(cfg.seed, stream::layout);

  // Labels: cluster blocks of the configured sizes, randomly spread over rows.
  GroundTruth truth;
  truth.labels.reserve(n);
  for (int c = 0; c < k; ++c) truth.labels.insert(truth.labels.end(), cfg.cluster_sizes[c], c + 1);
  std::shuffle(truth.labels.begin(), truth.labels.end(), layout);

  // Affected sets: a pool shared by every cluster plus disjoint remainders.
  std::vector<int> order(cfg.n_variables);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), layout);
  const int unique = cfg.vars_per_cluster - cfg.overlap_count;
  truth.affected.resize(k);
  truth.direction.resize(k);
  std::bernoulli_distribution coin(0.5);
  for (int c = 0; c < k; ++c) {
    auto& set = truth.affected[c];
    set.assign(order.begin(), order.begin() + cfg.overlap_count);
    const auto first = order.begin() + cfg.overlap_count + static_cast<long>(c) * unique;
    set.insert(set.end(), first, first + unique);
    std::sort(set.begin(), set.end());
    for (std::size_t v = 0; v < set.size(); ++v) {
      int sign = cfg.direction_mode == Direction::decrease ? -1 : 1;
      if (cfg.direction_mode == Direction::mixed) sign = coin(layout) ? 1 : -1;
      truth.direction[c].push_back(sign);
    }
  }

  LabeledDataset ds;
  ds.data = base_patients;
  ds.roles.assign(n, Role::patient);
  truth.severity.resize(n, 3);

  for (int i = 0; i < n; ++i) {
    Rng rng = make_rng(cfg.seed, stream::patient, i);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> eta_dist(1.0, cfg.sigma);
    for (int s = 0; s < 3; ++s) {
      const double u = unit(rng);
      truth.severity(i, s) = cfg.severity_mode == SeverityMode::fixed ? 1.0 : u;
    }
    const int c = truth.labels[i] - 1;
    const auto& set = truth.affected[c];
    for (std::size_t v = 0; v < set.size(); ++v) {
      const int j = set[v];
      const double eta = cfg.sigma > 0 ? std::max(0.0, eta_dist(rng)) : 1.0;
      const double s = truth.severity(i, severity_component(base_patients.family[j]));
      const double base = base_patients.values(i, j);
      ds.data.values(i, j) = base + truth.direction[c][v] * base * s * eta * cfg.alpha;
    }
  }

  ds.participant_ids.reserve(n);
  for (int i = 0; i < n; ++i) ds.participant_ids.push_back("P" + std::to_string(i + 1));
  ds.truth = std::move(truth);
  ds.provenance.config = cfg;
  return ds;
}

// Controls followed by patients, with fresh participant ids.
inline LabeledDataset assemble(const CohortMatrix& controls, const LabeledDataset& patients) {
  if (controls.variable_names != patients.data.variable_names)
    throw DataError("controls and patients must share variables");
  LabeledDataset ds;
  ds.data.variable_names = controls.variable_names;
  ds.data.family = controls.family;
  ds.data.values.resize(controls.rows() + patients.data.rows(), controls.cols());
  ds.data.values << controls.values, patients.data.values;
  ds.roles.assign(controls.rows(), Role::control);
  ds.roles.insert(ds.roles.end(), patients.roles.begin(), patients.roles.end());
  for (Eigen::Index i = 0; i < controls.rows(); ++i) ds.participant_ids.push_back("C" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < patients.data.rows(); ++i) ds.participant_ids.push_back("P" + std::to_string(i + 1));
  ds.truth = patients.truth;
  ds.provenance = patients.provenance;
  return ds;
}

} // namespace biobench::datagen
