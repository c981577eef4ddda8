#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <json.hpp>

#include "biobench/core/deadline.hpp"
#include "biobench/core/error.hpp"
#include "biobench/core/parallel.hpp"
#include "biobench/core/rng.hpp"
#include "biobench/datagen/types.hpp"
#include "biobench/datagen/zscore.hpp"
#include "biobench/eval/kmeans.hpp"
#include "biobench/eval/matching.hpp"
#include "biobench/hydra/dpp.hpp"
#include "biobench/hydra/svm.hpp"

namespace biobench::hydra {

struct Polytope {
  std::vector<Hyperplane> faces;

  int k() const { return static_cast<int>(faces.size()); }
};

// label_i = argmax_k (w_k . x_i + b_k), 1-based, ties to the smallest k.
inline std::vector<int> polytope_assign(const Polytope& p, const Matrix& x) {
  if (p.faces.empty()) throw ConfigError("polytope has no faces");
  for (const auto& f : p.faces)
    if (f.w.size() != x.cols()) throw DataError("polytope dimension does not match data");
  std::vector<int> labels(x.rows(), 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = p.faces[0].score(x.row(i).transpose());
    for (int k = 1; k < p.k(); ++k) {
      const double s = p.faces[k].score(x.row(i).transpose());
      if (s > best) {
        best = s;
        labels[i] = k + 1;
      }
    }
  }
  return labels;
}

struct HydraConfig {
  int k = 2;
  double c = 1.0;
  int n_init = 20;
  int max_iter = 50;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  int workers = 1;
  // Share of patients offered to the DPP seeding of each initialization.
  double dpp_fraction = 0.1;
  // Principal axes used for DPP seeding and nearest-seed labels (0 = 2K).
  int seeding_dims = 0;

  void validate() const {
    if (k < 1) throw ConfigError("HYDRA needs K >= 1");
    if (!(c > 0)) throw ConfigError("HYDRA C must be positive");
    if (n_init < 1 || max_iter < 1) throw ConfigError("HYDRA n_init and max_iter must be positive");
    if (!(tol > 0)) throw ConfigError("HYDRA tol must be positive");
    if (!(dpp_fraction > 0 && dpp_fraction <= 1)) throw ConfigError("dpp_fraction must lie in (0, 1]");
    if (seeding_dims < 0) throw ConfigError("seeding_dims must be non-negative");
  }
};

struct ReseedEvent {
  int iteration;
  int face;    // 1-based
  int patient; // 0-based patient index
};

struct InitTrace {
  std::vector<int> seeds;         // patient indices chosen by the DPP
  std::vector<double> objective;  // polytope objective after each alternation
  std::vector<ReseedEvent> reseeds;
  std::vector<int> labels;
  int iterations = 0;
  bool converged = false;
};

struct HydraFit {
  std::vector<int> labels; // consensus, 1..K, patient order
  Polytope polytope;       // refit on the consensus labels, in feature space
  std::vector<InitTrace> traces;
  datagen::ControlStats scaling; // feature standardization applied before fitting
};

// M_ij = share of runs that place patients i and j in the same cluster.
inline Matrix coassignment_matrix(const std::vector<std::vector<int>>& assignments) {
  if (assignments.empty()) throw ConfigError("co-assignment needs at least one assignment");
  const auto n = static_cast<Eigen::Index>(assignments[0].size());
  Matrix m = Matrix::Zero(n, n);
  for (const auto& a : assignments) {
    if (static_cast<Eigen::Index>(a.size()) != n) throw DataError("assignments differ in length");
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (a[i] == a[j]) m(i, j) += 1.0;
  }
  return m / static_cast<double>(assignments.size());
}

// Spectral partitioning of the co-assignment matrix: the top-K eigenvectors
// embed the patients, k-means splits the embedding. M = F F^T with F the
// scaled one-hot indicator blocks, so the eigenvectors come from the small
// Gram matrix F^T F.
inline std::vector<int> consensus_aggregate(const std::vector<std::vector<int>>& assignments, int k, std::uint64_t seed) {
  if (assignments.empty()) throw ConfigError("consensus needs at least one assignment");
  if (k < 1) throw ConfigError("consensus needs K >= 1");
  const auto n = static_cast<Eigen::Index>(assignments[0].size());
  if (k == 1) return std::vector<int>(n, 1);

  std::vector<Eigen::Index> offset{0};
  std::vector<std::vector<int>> levels;
  for (const auto& a : assignments) {
    if (static_cast<Eigen::Index>(a.size()) != n) throw DataError("assignments differ in length");
    levels.push_back(eval::distinct_sorted(a));
    offset.push_back(offset.back() + static_cast<Eigen::Index>(levels.back().size()));
  }
  Matrix f = Matrix::Zero(n, offset.back());
  const double scale = 1.0 / std::sqrt(static_cast<double>(assignments.size()));
  for (std::size_t r = 0; r < assignments.size(); ++r)
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto col = std::lower_bound(levels[r].begin(), levels[r].end(), assignments[r][i]) - levels[r].begin();
      f(i, offset[r] + col) = scale;
    }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(f.transpose() * f);
  const Eigen::Index m = eig.eigenvalues().size();
  const Eigen::Index dims = std::min<Eigen::Index>(k, m);
  // Eigenvalues ascend; the embedding F v equals the eigenvector times sqrt(lambda).
  Matrix embed = f * eig.eigenvectors().rightCols(dims);
  // Deterministic sign convention for each eigenvector.
  for (Eigen::Index c = 0; c < dims; ++c) {
    Eigen::Index arg = 0;
    embed.col(c).cwiseAbs().maxCoeff(&arg);
    if (embed(arg, c) < 0) embed.col(c) *= -1;
  }
  return eval::kmeans(embed, k, seed, 10).labels;
}

namespace detail {

struct Problem {
  Matrix x;     // standardized features, controls then patients
  Matrix gram;  // x x^T
  int n_controls = 0;
  int n_patients = 0;
  double control_cost = 0;
  double patient_cost = 0;
  Matrix seeding; // patients projected on their leading principal axes
};

struct FaceSet {
  Polytope polytope;
  double objective = 0;
};

inline FaceSet train_faces(const Problem& pb, const std::vector<int>& labels, int k, double tol) {
  FaceSet out;
  for (int face = 1; face <= k; ++face) {
    std::vector<int> rows, y;
    std::vector<double> cost;
    for (int i = 0; i < pb.n_controls; ++i) {
      rows.push_back(i);
      y.push_back(-1);
      cost.push_back(pb.control_cost);
    }
    for (int p = 0; p < pb.n_patients; ++p)
      if (labels[p] == face) {
        rows.push_back(pb.n_controls + p);
        y.push_back(1);
        cost.push_back(pb.patient_cost);
      }
    SvmResult r = train_hyperplane_gram(pb.x, pb.gram, rows, y, cost, tol);
    out.objective += r.objective;
    out.polytope.faces.push_back(std::move(r.plane));
  }
  return out;
}

inline Matrix patient_block(const Problem& pb) { return pb.x.bottomRows(pb.n_patients); }

// Scores on the `dims` leading principal axes of the centered rows.
inline Matrix principal_scores(const Matrix& x, int dims) {
  const Matrix centered = x.rowwise() - x.colwise().mean();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(centered.transpose() * centered);
  const Eigen::Index q = std::min<Eigen::Index>(dims, x.cols());
  return centered * eig.eigenvectors().rightCols(q);
}

// Gives every empty face one patient: the one least captured by the current
// polytope (smallest maximal face score) among clusters with more than one member.
inline void reseed_empty(const Problem& pb, const Polytope& poly, std::vector<int>& labels, int k, int iteration,
                         std::vector<ReseedEvent>& events) {
  for (int face = 1; face <= k; ++face) {
    std::vector<int> counts(k + 1, 0);
    for (int l : labels) ++counts[l];
    if (counts[face] > 0) continue;
    int chosen = -1;
    double lowest = std::numeric_limits<double>::infinity();
    for (int p = 0; p < pb.n_patients; ++p) {
      if (counts[labels[p]] <= 1) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& f : poly.faces) best = std::max(best, f.score(pb.x.row(pb.n_controls + p).transpose()));
      if (best < lowest) {
        lowest = best;
        chosen = p;
      }
    }
    if (chosen < 0) throw FitError("cannot reseed empty HYDRA face: too few patients");
    labels[chosen] = face;
    events.push_back({iteration, face, chosen});
  }
}

inline InitTrace run_init(const Problem& pb, const HydraConfig& cfg, int init, const Deadline& deadline) {
  InitTrace tr;
  const Matrix patients = patient_block(pb);
  const Matrix& seeding = pb.seeding;
  Rng rng = make_rng(cfg.seed, stream::init, init);

  // DPP seeds drawn from a random share of the patients.
  std::vector<int> pool(pb.n_patients);
  std::iota(pool.begin(), pool.end(), 0);
  std::shuffle(pool.begin(), pool.end(), rng);
  const int take = std::max(cfg.k, static_cast<int>(std::ceil(cfg.dpp_fraction * pb.n_patients)));
  pool.resize(std::min(take, pb.n_patients));
  Matrix sub(pool.size(), seeding.cols());
  for (std::size_t r = 0; r < pool.size(); ++r) sub.row(r) = seeding.row(pool[r]);
  for (int s : dpp_select(sub, cfg.k, derive_seed(cfg.seed, stream::init, init, 1))) tr.seeds.push_back(pool[s]);

  std::vector<int> labels(pb.n_patients, 1);
  for (int p = 0; p < pb.n_patients; ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < cfg.k; ++s) {
      const double d = (seeding.row(p) - seeding.row(tr.seeds[s])).squaredNorm();
      if (d < best) {
        best = d;
        labels[p] = s + 1;
      }
    }
  }

  for (int it = 0; it < cfg.max_iter; ++it) {
    deadline.check();
    const FaceSet faces = train_faces(pb, labels, cfg.k, cfg.tol);
    tr.objective.push_back(faces.objective);
    tr.iterations = it + 1;
    std::vector<int> next = polytope_assign(faces.polytope, patients);
    reseed_empty(pb, faces.polytope, next, cfg.k, it + 1, tr.reseeds);
    if (next == labels) {
      tr.converged = true;
      break;
    }
    labels = std::move(next);
  }
  tr.labels = std::move(labels);
  return tr;
}

} // namespace detail

// Semi-supervised clustering by a polytope of K max-margin faces that
// separate controls (-1) from patients (+1). Each initialization alternates
// face training with hard reassignment of patients to their best-scoring face;
// the initializations are merged by consensus and the polytope is refit on the
// consensus labels. Features are standardized with control statistics.
inline HydraFit fit_hydra(const datagen::LabeledDataset& ds, const HydraConfig& cfg,
                          const Deadline& deadline = Deadline::never()) {
  cfg.validate();
  const std::vector<int> ctrl = ds.control_rows(), pat = ds.patient_rows();
  if (ctrl.empty() || pat.empty()) throw DataError("HYDRA needs both controls and patients");
  if (static_cast<int>(pat.size()) < cfg.k) throw DataError("HYDRA needs at least K patients");

  HydraFit fit;
  fit.scaling = datagen::control_stats(ds);
  detail::Problem pb;
  pb.n_controls = static_cast<int>(ctrl.size());
  pb.n_patients = static_cast<int>(pat.size());
  std::vector<int> order = ctrl;
  order.insert(order.end(), pat.begin(), pat.end());
  pb.x = datagen::standardize(ds.data.subset(order).values, fit.scaling);
  if (!pb.x.allFinite()) throw DataError("non-finite features");
  pb.gram = pb.x * pb.x.transpose();
  pb.seeding = detail::principal_scores(detail::patient_block(pb), cfg.seeding_dims > 0 ? cfg.seeding_dims : 2 * cfg.k);
  // Constant weights keep the alternation objective monotone: each face sees
  // the controls with total mass equal to an average cluster's.
  pb.patient_cost = cfg.c;
  pb.control_cost = cfg.c * static_cast<double>(pb.n_patients) / (cfg.k * static_cast<double>(pb.n_controls));

  if (cfg.k == 1) {
    std::vector<int> ones(pb.n_patients, 1);
    fit.labels = ones;
    fit.polytope = detail::train_faces(pb, ones, 1, cfg.tol).polytope;
    InitTrace tr;
    tr.labels = ones;
    tr.iterations = 1;
    tr.converged = true;
    fit.traces.push_back(std::move(tr));
    return fit;
  }

  fit.traces.resize(cfg.n_init);
  parallel_for(static_cast<std::size_t>(cfg.n_init), cfg.workers,
               [&](std::size_t r) { fit.traces[r] = detail::run_init(pb, cfg, static_cast<int>(r), deadline); });
  deadline.check();

  std::vector<std::vector<int>> runs;
  for (const auto& t : fit.traces) runs.push_back(t.labels);
  fit.labels = consensus_aggregate(runs, cfg.k, derive_seed(cfg.seed, stream::consensus));
  fit.polytope = detail::train_faces(pb, fit.labels, cfg.k, cfg.tol).polytope;
  return fit;
}

inline nlohmann::json fit_report(const HydraFit& fit) {
  nlohmann::json j;
  j["labels"] = fit.labels;
  nlohmann::json faces = nlohmann::json::array();
  for (const auto& f : fit.polytope.faces)
    faces.push_back({{"w", std::vector<double>(f.w.data(), f.w.data() + f.w.size())}, {"b", f.b}});
  j["polytope"] = faces;
  j["feature_mean"] = std::vector<double>(fit.scaling.mean.data(), fit.scaling.mean.data() + fit.scaling.mean.size());
  j["feature_sd"] = std::vector<double>(fit.scaling.sd.data(), fit.scaling.sd.data() + fit.scaling.sd.size());
  nlohmann::json inits = nlohmann::json::array();
  for (const auto& t : fit.traces) {
    nlohmann::json r;
    r["seeds"] = t.seeds;
    r["objective"] = t.objective;
    r["iterations"] = t.iterations;
    r["converged"] = t.converged;
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& e : t.reseeds) ev.push_back({{"iteration", e.iteration}, {"face", e.face}, {"patient", e.patient}});
    r["reseeds"] = ev;
    inits.push_back(r);
  }
  j["initializations"] = inits;
  return j;
}

} // namespace biobench::hydra
