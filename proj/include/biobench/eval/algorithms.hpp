#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "biobench/core/deadline.hpp"
#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"
#include "biobench/core/rng.hpp"
#include "biobench/datagen/types.hpp"
#include "biobench/datagen/zscore.hpp"
#include "biobench/eval/kmeans.hpp"
#include "biobench/eval/matching.hpp"
#include "biobench/gan/smile.hpp"
#include "biobench/gan/surreal.hpp"
#include "biobench/hydra/hydra.hpp"
#include "biobench/sustain/fit.hpp"

namespace biobench::hydra {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(HydraConfig, k, c, n_init, max_iter, tol, seed, workers, dpp_fraction, seeding_dims)
}
namespace biobench::sustain {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SustainConfig, n_subtypes, n_restarts, max_em_iter, greedy_passes, tol, seed, workers,
                                                thresholds, z_max, noise, max_variables)
}

namespace biobench::eval {

enum class Algorithm { hydra, smilegan, surrealgan, sustain };

inline constexpr Algorithm kAlgorithms[] = {Algorithm::hydra, Algorithm::smilegan, Algorithm::surrealgan, Algorithm::sustain};

inline std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::hydra: return "hydra";
    case Algorithm::smilegan: return "smilegan";
    case Algorithm::surrealgan: return "surrealgan";
    case Algorithm::sustain: return "sustain";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  for (Algorithm a : kAlgorithms)
    if (algorithm_name(a) == s) return a;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected hydra, smilegan, surrealgan or sustain)");
}

// Defaults of `T` overridden by the keys of `over`; unknown keys are errors.
template <typename T>
T with_overrides(const T& defaults, const nlohmann::json& over, std::string_view what) {
  nlohmann::json j = defaults;
  if (over.is_null()) return defaults;
  if (!over.is_object()) throw ConfigError(std::string(what) + " parameters must be a table");
  for (const auto& [key, value] : over.items()) {
    if (!j.contains(key)) throw ConfigError("unknown " + std::string(what) + " parameter '" + key + "'");
    j[key] = value;
  }
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(what) + " parameters: " + e.what());
  }
}

// Per-cluster mean patient z-vector (control-referenced), one row per planted cluster.
inline Matrix truth_patterns(const datagen::LabeledDataset& ds) {
  const auto& truth = ds.require_truth();
  const Matrix z = datagen::z_transform(ds);
  Matrix out = Matrix::Zero(truth.n_clusters(), z.cols());
  std::vector<int> count(truth.n_clusters(), 0);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    out.row(truth.labels[i] - 1) += z.row(i);
    ++count[truth.labels[i] - 1];
  }
  for (int k = 0; k < truth.n_clusters(); ++k)
    if (count[k] > 0) out.row(k) /= count[k];
  return out;
}

// Columns flipped so that every patient mean is non-negative; events then
// describe rising abnormality.
inline Matrix sign_aligned(const Matrix& z) {
  Matrix out = z;
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    if (z.col(j).mean() < 0) out.col(j) *= -1;
  return out;
}

struct FitOutput {
  std::vector<int> labels;               // 1..K, patient order
  Matrix scores;                         // patients x K (probabilities, R-indices or subtype posteriors); empty for hydra
  std::optional<Matrix> directions;      // unit pattern directions, pattern models only
  nlohmann::json model;
};

// Fits one algorithm on one dataset with K clusters/patterns/subtypes.
inline FitOutput fit_algorithm(Algorithm a, const datagen::LabeledDataset& ds, int k, std::uint64_t seed,
                               const nlohmann::json& overrides = {}, int workers = 1,
                               const Deadline& deadline = Deadline::never()) {
  if (k < 1) throw ConfigError("K must be >= 1");
  FitOutput out;
  switch (a) {
    case Algorithm::hydra: {
      auto cfg = with_overrides(hydra::HydraConfig{}, overrides, "hydra");
      cfg.k = k;
      cfg.seed = seed;
      cfg.workers = workers;
      auto fit = hydra::fit_hydra(ds, cfg, deadline);
      out.labels = fit.labels;
      out.model = hydra::fit_report(fit);
      out.model["config"] = cfg;
      break;
    }
    case Algorithm::smilegan: {
      auto cfg = with_overrides(gan::TrainConfig{}, overrides, "smilegan");
      cfg.seed = seed;
      cfg.workers = workers;
      const auto z = datagen::z_split(ds);
      auto fit = gan::fit_smile(z.controls, z.patients, k, cfg, deadline);
      auto assign = gan::smile_assign(fit.model, z.patients);
      out.labels = std::move(assign.labels);
      out.scores = std::move(assign.probs);
      out.directions = gan::pattern_directions(fit.model, z.controls);
      out.model = gan::checkpoint(fit.model);
      out.model["restart"] = fit.restart;
      out.model["restart_scores"] = fit.restart_scores;
      break;
    }
    case Algorithm::surrealgan: {
      auto cfg = with_overrides(gan::TrainConfig{}, overrides, "surrealgan");
      cfg.seed = seed;
      cfg.workers = workers;
      const auto z = datagen::z_split(ds);
      auto fit = gan::fit_surreal(z.controls, z.patients, k, cfg, deadline);
      out.scores = gan::r_indices(fit.model, z.patients);
      out.labels = gan::argmax_labels(out.scores);
      out.directions = gan::pattern_directions(fit.model, z.controls);
      out.model = gan::checkpoint(fit.model);
      out.model["restart"] = fit.restart;
      out.model["restart_scores"] = fit.restart_scores;
      break;
    }
    case Algorithm::sustain: {
      auto cfg = with_overrides(sustain::SustainConfig{}, overrides, "sustain");
      cfg.n_subtypes = k;
      cfg.seed = seed;
      cfg.workers = workers;
      const Matrix all = sign_aligned(datagen::z_transform(ds));
      const auto keep = sustain::select_variables(all, cfg.max_variables);
      Matrix z(all.rows(), static_cast<Eigen::Index>(keep.size()));
      std::vector<std::string> names;
      for (std::size_t j = 0; j < keep.size(); ++j) {
        z.col(j) = all.col(keep[j]);
        names.push_back(ds.data.variable_names[keep[j]]);
      }
      auto fit = sustain::fit_sustain(z, cfg, deadline);
      const auto post = sustain::stage_and_assign(fit.model, z);
      out.labels = post.labels();
      out.scores.resize(z.rows(), k);
      for (Eigen::Index i = 0; i < z.rows(); ++i) out.scores.row(i) = post.subtype_marginal(i).transpose();
      out.model = sustain::model_json(fit.model, names);
      out.model["loglik"] = fit.loglik;
      out.model["stages"] = post.stages();
      break;
    }
  }
  deadline.check();
  return out;
}

struct GapResult {
  double pattern_score = 0;
  double individual_accuracy = 0;
};

// Pattern-level agreement of the learned directions versus individual-level
// agreement of k-means clusters on the R-index vectors.
inline GapResult rindex_cluster_gap(const Matrix& r_indices, const Matrix& directions, const std::vector<int>& truth_labels,
                                    const Matrix& truth_vectors, std::uint64_t seed, int n_init = 10) {
  if (r_indices.rows() != static_cast<Eigen::Index>(truth_labels.size()))
    throw DataError("R-index rows do not match the truth labels");
  GapResult g;
  g.pattern_score = pattern_score(directions, truth_vectors);
  const auto km = kmeans(r_indices, static_cast<int>(truth_vectors.rows()), seed, n_init);
  g.individual_accuracy = matched_accuracy(km.labels, truth_labels).accuracy;
  return g;
}

inline GapResult rindex_cluster_gap(const gan::SurrealModel& model, const datagen::LabeledDataset& ds, std::uint64_t seed) {
  const auto z = datagen::z_split(ds);
  return rindex_cluster_gap(gan::r_indices(model, z.patients), gan::pattern_directions(model, z.controls), ds.require_truth().labels,
                            truth_patterns(ds), seed);
}

} // namespace biobench::eval
