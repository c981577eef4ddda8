#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "biobench/core/deadline.hpp"
#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"
#include "biobench/core/parallel.hpp"
#include "biobench/core/rng.hpp"
#include "biobench/gan/common.hpp"
#include "biobench/gan/params.hpp"

namespace biobench::gan {

// K affine mapping functions f_k(x) = x + A_k x + c_k from controls to
// pseudo-patients, an LS discriminator and an inverse-cluster network
// Q(y) = softmax(W y + b).
struct SmileModel {
  int d = 0, k = 0;
  TrainConfig cfg;
  ParamSet gen, disc;
  std::vector<int> a, c; // gen block indices per mapping
  int q_w = -1, q_b = -1;
  Discriminator discriminator;

  SmileModel() = default;

  SmileModel(int dims, int clusters, const TrainConfig& config) : d(dims), k(clusters), cfg(config) {
    if (d < 1) throw ConfigError("SmileGAN needs at least one variable");
    if (k < 2) throw ConfigError("SmileGAN needs K >= 2");
    for (int j = 0; j < k; ++j) {
      a.push_back(gen.add("map" + std::to_string(j + 1) + ".A", d, d));
      c.push_back(gen.add("map" + std::to_string(j + 1) + ".c", d, 1));
    }
    q_w = gen.add("q.W", k, d);
    q_b = gen.add("q.b", k, 1);
    discriminator.declare(disc, d, cfg.hidden);
  }

  void initialize(std::uint64_t seed) {
    Rng rng = make_rng(seed);
    for (int j = 0; j < k; ++j) {
      fill_normal(gen.val(a[j]), 0.01, rng);
      fill_normal(gen.val(c[j]), 0.1, rng);
    }
    fill_normal(gen.val(q_w), 1.0 / std::sqrt(static_cast<double>(d)), rng);
    discriminator.init(disc, rng);
  }

  Matrix map(int j, const Matrix& x) const {
    return x + x * gen.val(a[j]).transpose() + Matrix::Ones(x.rows(), 1) * gen.val(c[j]).transpose();
  }

  Matrix cluster_probs(const Matrix& y) const {
    return softmax_rows((y * gen.val(q_w).transpose()).rowwise() + gen.val(q_b).col(0).transpose());
  }
};

// One generator minibatch: controls and the mapping index of each row.
struct SmileBatch {
  Matrix controls;
  std::vector<int> mapping; // 0-based
  Matrix patients;
};

struct SmileLoss {
  double adv = 0, change = 0, cluster = 0, sparse = 0;
  double total() const { return adv + change + cluster + sparse; }
};

namespace detail {

inline Matrix smile_fakes(const SmileModel& m, const SmileBatch& b) {
  Matrix y(b.controls.rows(), m.d);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const int j = b.mapping[i];
    y.row(i) = b.controls.row(i) + b.controls.row(i) * m.gen.val(m.a[j]).transpose() + m.gen.val(m.c[j]).transpose();
  }
  return y;
}

} // namespace detail

// Generator objective; with `grad`, accumulates gradients of the generator
// blocks (mappings and Q).
inline SmileLoss smile_generator_loss(SmileModel& m, const SmileBatch& b, bool grad) {
  const TrainConfig& cfg = m.cfg;
  const double mu = cfg.smoothing;
  const auto n = b.controls.rows();
  const double inv = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  SmileLoss L;
  const Matrix y = detail::smile_fakes(m, b);

  Matrix dy;
  L.adv = adversarial_loss(m.discriminator, m.disc, y, grad ? &dy : nullptr);
  if (!grad) dy.resize(0, 0);

  // Change loss: mean L1 displacement.
  const Matrix diff = y - b.controls;
  for (Eigen::Index i = 0; i < diff.size(); ++i) L.change += sabs(diff.data()[i], mu);
  L.change *= cfg.lambda_change * inv;
  if (grad) dy += (cfg.lambda_change * inv) * diff.unaryExpr([mu](double u) { return sabs_grad(u, mu); });

  // Cluster loss: cross-entropy of Q on the mapping index.
  if (n > 0) {
    const Matrix p = m.cluster_probs(y);
    double ce = 0;
    for (Eigen::Index i = 0; i < n; ++i) ce -= std::log(std::max(p(i, b.mapping[i]), 1e-300));
    L.cluster = cfg.lambda_cluster * ce * inv;
    if (grad) {
      Matrix dlog = p;
      for (Eigen::Index i = 0; i < n; ++i) dlog(i, b.mapping[i]) -= 1.0;
      dlog *= cfg.lambda_cluster * inv;
      m.gen.grad(m.q_w) += dlog.transpose() * y;
      m.gen.grad(m.q_b).col(0) += dlog.colwise().sum().transpose();
      dy += dlog * m.gen.val(m.q_w);
    }
  }

  for (int j = 0; j < m.k; ++j) {
    const Matrix& aj = m.gen.val(m.a[j]);
    for (Eigen::Index i = 0; i < aj.size(); ++i) L.sparse += sabs(aj.data()[i], mu);
    if (grad) m.gen.grad(m.a[j]) += cfg.lambda_sparse * aj.unaryExpr([mu](double u) { return sabs_grad(u, mu); });
  }
  L.sparse *= cfg.lambda_sparse;

  if (grad)
    for (Eigen::Index i = 0; i < n; ++i) {
      const int j = b.mapping[i];
      m.gen.grad(m.a[j]) += dy.row(i).transpose() * b.controls.row(i);
      m.gen.grad(m.c[j]).col(0) += dy.row(i).transpose();
    }
  return L;
}

inline double smile_discriminator_loss(SmileModel& m, const SmileBatch& b, bool grad) {
  return discriminator_step_loss(m.discriminator, m.disc, b.patients, detail::smile_fakes(m, b), grad);
}

inline SmileBatch draw_smile_batch(const SmileModel& m, const Matrix& controls, const Matrix& patients, Rng& rng) {
  SmileBatch b;
  b.controls = sample_rows(controls, m.cfg.batch_size, rng);
  b.patients = sample_rows(patients, m.cfg.batch_size, rng);
  std::uniform_int_distribution<int> pick(0, m.k - 1);
  b.mapping.resize(m.cfg.batch_size);
  for (auto& j : b.mapping) j = pick(rng);
  return b;
}

struct SmileFit {
  SmileModel model;
  Curve curve;
  int restart = 0;
  std::vector<double> restart_scores; // late adversarial loss per restart
};

namespace detail {

inline SmileFit train_smile_once(const Matrix& controls, const Matrix& patients, int k, const TrainConfig& cfg, int restart,
                                 const Deadline& deadline) {
  SmileFit fit{SmileModel(static_cast<int>(controls.cols()), k, cfg), {}, restart, {}};
  SmileModel& m = fit.model;
  m.initialize(derive_seed(cfg.seed, stream::train, restart, 0));
  Rng rng = make_rng(cfg.seed, stream::train, restart, 1);
  if (cfg.init_offset > 0) {
    const Matrix offsets = centroid_offsets(controls, patients, k, derive_seed(cfg.seed, stream::train, restart, 2));
    for (int j = 0; j < k; ++j) m.gen.val(m.c[j]).col(0) = cfg.init_offset * offsets.row(j).transpose();
  }
  fit.curve.columns = {"loss_total", "loss_adv", "loss_change", "loss_cluster", "loss_sparse", "loss_disc"};
  OptimizerState gen_opt{cfg.optimizer, cfg.lr, cfg.momentum, 0};
  OptimizerState disc_opt{cfg.optimizer, cfg.lr * cfg.disc_lr_scale, cfg.momentum, 0};

  for (int step = 1; step <= cfg.n_steps; ++step) {
    if (step % 16 == 0) deadline.check();
    const SmileBatch b = draw_smile_batch(m, controls, patients, rng);
    m.disc.zero_grad();
    const double ld = smile_discriminator_loss(m, b, true);
    apply_update(m.disc, disc_opt);

    m.gen.zero_grad();
    const SmileLoss lg = smile_generator_loss(m, b, true);
    apply_update(m.gen, gen_opt);
    for (int j = 0; j < m.k; ++j) project_frobenius(m.gen.val(m.a[j]), cfg.l_bound);
    project_frobenius(m.gen.val(m.q_w), cfg.q_bound);

    if (!std::isfinite(ld) || !std::isfinite(lg.total()) || !m.gen.finite() || !m.disc.finite())
      throw FitError("SmileGAN: non-finite loss at step " + std::to_string(step));
    if (step % cfg.log_every == 0 || step == cfg.n_steps)
      fit.curve.rows.push_back({step, {lg.total(), lg.adv, lg.change, lg.cluster, lg.sparse, ld}});
  }
  return fit;
}

} // namespace detail

// Alternating LS-GAN training: one discriminator step, then one generator
// step followed by projection of every A_k (and of Q's weights) onto a
// Frobenius ball. Independent restarts run in parallel; the run whose
// generator fools the discriminator best late in training is kept.
inline SmileFit fit_smile(const Matrix& controls, const Matrix& patients, int k, const TrainConfig& cfg,
                          const Deadline& deadline = Deadline::never()) {
  cfg.validate();
  require_same_width(controls, patients);
  if (k < 2) throw ConfigError("SmileGAN needs K >= 2");
  std::vector<SmileFit> runs(cfg.restarts);
  parallel_for(runs.size(), cfg.workers, [&](std::size_t r) {
    runs[r] = detail::train_smile_once(controls, patients, k, cfg, static_cast<int>(r), deadline);
  });
  std::vector<double> scores;
  for (const auto& r : runs) scores.push_back(late_mean(r.curve, 1));
  const auto best = static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
  SmileFit out = std::move(runs[best]);
  out.restart_scores = std::move(scores);
  return out;
}

struct SmileAssignment {
  Matrix probs;            // patients x K
  std::vector<int> labels; // 1..K, smallest index on ties
};

inline SmileAssignment smile_assign(const SmileModel& m, const Matrix& patients) {
  if (patients.cols() != m.d) throw DataError("SmileGAN: patient matrix width does not match the model");
  SmileAssignment out;
  out.probs = m.cluster_probs(patients);
  out.labels.resize(patients.rows());
  for (Eigen::Index i = 0; i < patients.rows(); ++i) {
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < m.k; ++j)
      if (out.probs(i, j) > out.probs(i, arg)) arg = j;
    out.labels[i] = static_cast<int>(arg) + 1;
  }
  return out;
}

// Unit mean displacement f_k(x) - x over the given controls, one row per k.
inline Matrix pattern_directions(const SmileModel& m, const Matrix& controls) {
  if (controls.rows() == 0) throw DataError("pattern_directions needs control rows");
  Matrix out(m.k, m.d);
  for (int j = 0; j < m.k; ++j) {
    Vector mean = (m.map(j, controls) - controls).colwise().mean().transpose();
    const double n = mean.norm();
    if (n > 0) mean /= n;
    out.row(j) = mean.transpose();
  }
  return out;
}

inline nlohmann::json checkpoint(const SmileModel& m) {
  return {{"model", "smilegan"}, {"d", m.d}, {"k", m.k}, {"config", m.cfg}, {"generator", params_to_json(m.gen)},
          {"discriminator", params_to_json(m.disc)}};
}

inline SmileModel load_smile(const nlohmann::json& j) {
  if (j.at("model") != "smilegan") throw DataError("checkpoint is not a SmileGAN model");
  SmileModel m(j.at("d").get<int>(), j.at("k").get<int>(), j.at("config").get<TrainConfig>());
  params_from_json(m.gen, j.at("generator"));
  params_from_json(m.disc, j.at("discriminator"));
  return m;
}

} // namespace biobench::gan
