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

inline constexpr double kMonotonicityStep = 0.1;

// f(x, r) = x + sum_m r_m (W_m x + b_m), with an inverse network that decodes
// r_hat = sigmoid(P y + p) and x_hat = R y + q from a (pseudo-)patient y.
struct SurrealModel {
  int d = 0, m = 0;
  TrainConfig cfg;
  ParamSet gen, disc;
  std::vector<int> w, b;
  int p_w = -1, p_b = -1, r_w = -1, r_b = -1;
  Discriminator discriminator;

  SurrealModel() = default;

  SurrealModel(int dims, int patterns, const TrainConfig& config) : d(dims), m(patterns), cfg(config) {
    if (d < 1) throw ConfigError("SurrealGAN needs at least one variable");
    if (m < 1) throw ConfigError("SurrealGAN needs M >= 1");
    for (int j = 0; j < m; ++j) {
      w.push_back(gen.add("pattern" + std::to_string(j + 1) + ".W", d, d));
      b.push_back(gen.add("pattern" + std::to_string(j + 1) + ".b", d, 1));
    }
    p_w = gen.add("inverse.P", m, d);
    p_b = gen.add("inverse.p", m, 1);
    r_w = gen.add("inverse.R", d, d);
    r_b = gen.add("inverse.q", d, 1);
    for (int i : {p_w, p_b, r_w, r_b}) gen[i].lr_scale = cfg.inverse_lr_scale;
    discriminator.declare(disc, d, cfg.hidden);
  }

  void initialize(std::uint64_t seed) {
    Rng rng = make_rng(seed);
    for (int j = 0; j < m; ++j) {
      fill_normal(gen.val(w[j]), 0.01, rng);
      fill_normal(gen.val(b[j]), 0.1, rng);
    }
    fill_normal(gen.val(p_w), 1.0 / std::sqrt(static_cast<double>(d)), rng);
    fill_normal(gen.val(r_w), 0.01, rng);
    discriminator.init(disc, rng);
  }

  Matrix pattern(int j, const Matrix& x) const {
    return x * gen.val(w[j]).transpose() + Matrix::Ones(x.rows(), 1) * gen.val(b[j]).transpose();
  }

  Matrix transform(const Matrix& x, const Matrix& r) const {
    Matrix y = x;
    for (int j = 0; j < m; ++j) y += r.col(j).asDiagonal() * pattern(j, x);
    return y;
  }

  Matrix decode_r(const Matrix& y) const {
    Matrix z = (y * gen.val(p_w).transpose()).rowwise() + gen.val(p_b).col(0).transpose();
    return z.unaryExpr([](double v) { return sigmoid(v); });
  }
};

// Double sampling: every control row appears twice, with independent r and r'.
struct SurrealBatch {
  Matrix controls; // B x d
  Matrix r, r2;    // B x M each
  Matrix patients;
};

struct SurrealLoss {
  double adv = 0, mono = 0, orth = 0, sparse = 0, recon = 0;
  double total() const { return adv + mono + orth + sparse + recon; }
};

namespace detail {

inline void stack_pairs(const SurrealBatch& b, Matrix& x2, Matrix& r) {
  x2.resize(2 * b.controls.rows(), b.controls.cols());
  x2 << b.controls, b.controls;
  r.resize(2 * b.r.rows(), b.r.cols());
  r << b.r, b.r2;
}

} // namespace detail

inline SurrealLoss surreal_generator_loss(SurrealModel& s, const SurrealBatch& batch, bool grad) {
  const TrainConfig& cfg = s.cfg;
  const double mu = cfg.smoothing;
  Matrix x, r;
  detail::stack_pairs(batch, x, r);
  const auto n = x.rows();
  const double inv = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  SurrealLoss L;

  std::vector<Matrix> g(s.m);
  Matrix y = x;
  for (int j = 0; j < s.m; ++j) {
    g[j] = s.pattern(j, x);
    y += r.col(j).asDiagonal() * g[j];
  }

  Matrix dy;
  L.adv = adversarial_loss(s.discriminator, s.disc, y, grad ? &dy : nullptr);
  std::vector<Matrix> dg(s.m, Matrix::Zero(n, s.d));

  // Monotonicity: raising any r_m by delta must not shrink the deviation.
  if (n > 0 && cfg.lambda_mono > 0) {
    const Matrix dev = y - x;
    const Vector na = (dev.rowwise().squaredNorm().array() + mu * mu).sqrt();
    for (int j = 0; j < s.m; ++j) {
      const Matrix up = dev + kMonotonicityStep * g[j];
      const Vector nb = (up.rowwise().squaredNorm().array() + mu * mu).sqrt();
      for (Eigen::Index i = 0; i < n; ++i) {
        const double u = na(i) - nb(i);
        L.mono += shinge(u, mu);
        if (!grad) continue;
        const double wgt = cfg.lambda_mono * inv * shinge_grad(u, mu);
        if (wgt == 0) continue;
        dy.row(i) += wgt * dev.row(i) / na(i);
        const Eigen::RowVectorXd dup = -wgt * up.row(i) / nb(i);
        dy.row(i) += dup;
        dg[j].row(i) += kMonotonicityStep * dup;
      }
    }
    L.mono *= cfg.lambda_mono * inv;
  }

  // Orthogonality of the batch-mean pattern directions.
  if (n > 0 && s.m > 1 && cfg.lambda_orth > 0) {
    const Eigen::RowVectorXd xbar = x.colwise().mean();
    std::vector<Vector> gm(s.m);
    for (int j = 0; j < s.m; ++j) gm[j] = g[j].colwise().mean().transpose();
    for (int j = 0; j < s.m; ++j)
      for (int l = 0; l < s.m; ++l) {
        if (j == l) continue;
        const double nj = gm[j].norm(), nl = gm[l].norm();
        if (!(nj > 0 && nl > 0)) continue;
        const double cs = gm[j].dot(gm[l]) / (nj * nl);
        L.orth += cs * cs;
        if (!grad) continue;
        // Both ordered pairs (j, l) and (l, j) depend on g_j equally.
        const Vector dgj = cfg.lambda_orth * 4 * cs * (gm[l] / (nj * nl) - cs * gm[j] / (nj * nj));
        s.gen.grad(s.w[j]) += dgj * xbar;
        s.gen.grad(s.b[j]).col(0) += dgj;
      }
    L.orth *= cfg.lambda_orth;
  }

  for (int j = 0; j < s.m; ++j) {
    const Matrix& wj = s.gen.val(s.w[j]);
    for (Eigen::Index i = 0; i < wj.size(); ++i) L.sparse += sabs(wj.data()[i], mu);
    if (grad) s.gen.grad(s.w[j]) += cfg.lambda_sparse * wj.unaryExpr([mu](double u) { return sabs_grad(u, mu); });
  }
  L.sparse *= cfg.lambda_sparse;

  // Decomposition and inverse consistency.
  if (n > 0 && cfg.lambda_recon > 0) {
    const Matrix rh = s.decode_r(y);
    const Matrix xh = (y * s.gen.val(s.r_w).transpose()).rowwise() + s.gen.val(s.r_b).col(0).transpose();
    L.recon = cfg.lambda_recon * inv * ((rh - r).squaredNorm() + (xh - x).squaredNorm());
    if (grad) {
      const Matrix drh = (2 * cfg.lambda_recon * inv) * (rh - r);
      const Matrix dz = drh.array() * rh.array() * (1 - rh.array());
      s.gen.grad(s.p_w) += dz.transpose() * y;
      s.gen.grad(s.p_b).col(0) += dz.colwise().sum().transpose();
      const Matrix dxh = (2 * cfg.lambda_recon * inv) * (xh - x);
      s.gen.grad(s.r_w) += dxh.transpose() * y;
      s.gen.grad(s.r_b).col(0) += dxh.colwise().sum().transpose();
      dy += dz * s.gen.val(s.p_w) + dxh * s.gen.val(s.r_w);
    }
  }

  if (grad)
    for (int j = 0; j < s.m; ++j) {
      dg[j] += r.col(j).asDiagonal() * dy;
      s.gen.grad(s.w[j]) += dg[j].transpose() * x;
      s.gen.grad(s.b[j]).col(0) += dg[j].colwise().sum().transpose();
    }
  return L;
}

inline double surreal_discriminator_loss(SurrealModel& s, const SurrealBatch& b, bool grad) {
  Matrix x, r;
  detail::stack_pairs(b, x, r);
  return discriminator_step_loss(s.discriminator, s.disc, b.patients, s.transform(x, r), grad);
}

inline SurrealBatch draw_surreal_batch(const SurrealModel& s, const Matrix& controls, const Matrix& patients, Rng& rng) {
  SurrealBatch b;
  b.controls = sample_rows(controls, s.cfg.batch_size, rng);
  b.patients = sample_rows(patients, 2 * s.cfg.batch_size, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  b.r.resize(s.cfg.batch_size, s.m);
  b.r2.resize(s.cfg.batch_size, s.m);
  for (Eigen::Index i = 0; i < b.r.size(); ++i) b.r.data()[i] = unit(rng);
  for (Eigen::Index i = 0; i < b.r2.size(); ++i) b.r2.data()[i] = unit(rng);
  return b;
}

struct SurrealFit {
  SurrealModel model;
  Curve curve;
  int restart = 0;
  std::vector<double> restart_scores;
};

namespace detail {

inline SurrealFit train_surreal_once(const Matrix& controls, const Matrix& patients, int m, const TrainConfig& cfg, int restart,
                                     const Deadline& deadline) {
  SurrealFit fit{SurrealModel(static_cast<int>(controls.cols()), m, cfg), {}, restart, {}};
  SurrealModel& s = fit.model;
  s.initialize(derive_seed(cfg.seed, stream::train, restart, 0));
  fit.curve.columns = {"loss_total", "loss_adv", "loss_mono", "loss_orth", "loss_sparse", "loss_recon", "loss_disc"};
  Rng rng = make_rng(cfg.seed, stream::train, restart, 1);
  if (cfg.init_offset > 0 && m <= patients.rows()) {
    const Matrix offsets = centroid_offsets(controls, patients, m, derive_seed(cfg.seed, stream::train, restart, 2));
    for (int j = 0; j < m; ++j) s.gen.val(s.b[j]).col(0) = cfg.init_offset * offsets.row(j).transpose();
  }
  OptimizerState gen_opt{cfg.optimizer, cfg.lr, cfg.momentum, 0};
  OptimizerState disc_opt{cfg.optimizer, cfg.lr * cfg.disc_lr_scale, cfg.momentum, 0};

  for (int step = 1; step <= cfg.n_steps; ++step) {
    if (step % 16 == 0) deadline.check();
    const SurrealBatch b = draw_surreal_batch(s, controls, patients, rng);
    s.disc.zero_grad();
    const double ld = surreal_discriminator_loss(s, b, true);
    apply_update(s.disc, disc_opt);

    s.gen.zero_grad();
    const SurrealLoss lg = surreal_generator_loss(s, b, true);
    apply_update(s.gen, gen_opt);
    for (int j = 0; j < s.m; ++j) project_frobenius(s.gen.val(s.w[j]), cfg.l_bound);
    project_frobenius(s.gen.val(s.p_w), cfg.q_bound);

    if (!std::isfinite(ld) || !std::isfinite(lg.total()) || !s.gen.finite() || !s.disc.finite())
      throw FitError("SurrealGAN: non-finite loss at step " + std::to_string(step));
    if (step % cfg.log_every == 0 || step == cfg.n_steps)
      fit.curve.rows.push_back({step, {lg.total(), lg.adv, lg.mono, lg.orth, lg.sparse, lg.recon, ld}});
  }
  return fit;
}

} // namespace detail

inline SurrealFit fit_surreal(const Matrix& controls, const Matrix& patients, int m, const TrainConfig& cfg,
                              const Deadline& deadline = Deadline::never()) {
  cfg.validate();
  require_same_width(controls, patients);
  if (m < 1) throw ConfigError("SurrealGAN needs M >= 1");
  std::vector<SurrealFit> runs(cfg.restarts);
  parallel_for(runs.size(), cfg.workers, [&](std::size_t r) {
    runs[r] = detail::train_surreal_once(controls, patients, m, cfg, static_cast<int>(r), deadline);
  });
  std::vector<double> scores;
  for (const auto& r : runs) scores.push_back(late_mean(r.curve, 1));
  const auto best = static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
  SurrealFit out = std::move(runs[best]);
  out.restart_scores = std::move(scores);
  return out;
}

// R-indices of patient rows, clamped to [0,1]^M.
inline Matrix r_indices(const SurrealModel& s, const Matrix& patients) {
  if (patients.cols() != s.d) throw DataError("SurrealGAN: patient matrix width does not match the model");
  return s.decode_r(patients).cwiseMax(0.0).cwiseMin(1.0);
}

inline std::vector<int> argmax_labels(const Matrix& scores) {
  std::vector<int> out(scores.rows(), 1);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < scores.cols(); ++j)
      if (scores(i, j) > scores(i, arg)) arg = j;
    out[i] = static_cast<int>(arg) + 1;
  }
  return out;
}

// Unit mean of g_m(x) over the given controls, one row per pattern.
inline Matrix pattern_directions(const SurrealModel& s, const Matrix& controls) {
  if (controls.rows() == 0) throw DataError("pattern_directions needs control rows");
  Matrix out(s.m, s.d);
  for (int j = 0; j < s.m; ++j) {
    Vector mean = s.pattern(j, controls).colwise().mean().transpose();
    const double n = mean.norm();
    if (n > 0) mean /= n;
    out.row(j) = mean.transpose();
  }
  return out;
}

inline nlohmann::json checkpoint(const SurrealModel& s) {
  return {{"model", "surrealgan"}, {"d", s.d}, {"m", s.m}, {"config", s.cfg}, {"generator", params_to_json(s.gen)},
          {"discriminator", params_to_json(s.disc)}};
}

inline SurrealModel load_surreal(const nlohmann::json& j) {
  if (j.at("model") != "surrealgan") throw DataError("checkpoint is not a SurrealGAN model");
  SurrealModel s(j.at("d").get<int>(), j.at("m").get<int>(), j.at("config").get<TrainConfig>());
  params_from_json(s.gen, j.at("generator"));
  params_from_json(s.disc, j.at("discriminator"));
  return s;
}

} // namespace biobench::gan
