#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"
#include "biobench/core/rng.hpp"
#include "biobench/eval/kmeans.hpp"
#include "biobench/gan/params.hpp"

namespace biobench::gan {

struct TrainConfig {
  double lr = 0.02;
  double disc_lr_scale = 0.2; // discriminator learning rate = lr * scale
  double inverse_lr_scale = 0.1; // SurrealGAN decoder blocks
  int batch_size = 64;
  int n_steps = 1500;
  double lambda_change = 0.001;
  double lambda_cluster = 1.0;
  double lambda_sparse = 1e-4;
  double lambda_mono = 1.0;
  double lambda_orth = 1.0;
  double lambda_recon = 0.1;
  double l_bound = 2.0;
  double q_bound = 1.0; // Frobenius radius of the inverse network's weights
  int hidden = 32;
  // Initial mapping offsets: init_offset times patient k-means centroid offsets (0 = random).
  double init_offset = 1.0;
  // Scale below which L1 and hinge terms are smoothed (0 = exact kinks).
  double smoothing = 1e-3;
  Optimizer optimizer = Optimizer::sgd_momentum;
  double momentum = 0.9;
  int log_every = 10;
  // Independent training runs; the one with the lowest late adversarial loss wins.
  int restarts = 1;
  int workers = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(lr > 0) || !(disc_lr_scale > 0) || !(inverse_lr_scale > 0)) throw ConfigError("learning rates must be positive");
    if (batch_size < 1 || n_steps < 1 || hidden < 1 || log_every < 1 || restarts < 1)
      throw ConfigError("batch_size, n_steps, hidden, log_every and restarts must be positive");
    for (double v : {lambda_change, lambda_cluster, lambda_sparse, lambda_mono, lambda_orth, lambda_recon, smoothing, momentum})
      if (!(v >= 0) || !std::isfinite(v)) throw ConfigError("loss weights, smoothing and momentum must be non-negative");
    if (!(init_offset >= 0)) throw ConfigError("init_offset must be non-negative");
    if (!(l_bound > 0) || !(q_bound > 0)) throw ConfigError("L_bound and q_bound must be positive");
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainConfig, lr, disc_lr_scale, inverse_lr_scale, batch_size, n_steps, lambda_change, lambda_cluster, lambda_sparse,
                                                lambda_mono, lambda_orth, lambda_recon, l_bound, q_bound, hidden, init_offset, smoothing, optimizer,
                                                momentum, log_every, restarts, workers, seed)

// |u| smoothed as sqrt(u^2 + mu^2) - mu; exact when mu = 0.
inline double sabs(double u, double mu) { return mu > 0 ? std::sqrt(u * u + mu * mu) - mu : std::abs(u); }
inline double sabs_grad(double u, double mu) { return mu > 0 ? u / std::sqrt(u * u + mu * mu) : (u > 0) - (u < 0); }

// max(0, u) smoothed as mu * softplus(u / mu); exact when mu = 0.
inline double shinge(double u, double mu) {
  if (mu <= 0) return std::max(0.0, u);
  const double t = u / mu;
  return mu * (t > 30 ? t : std::log1p(std::exp(t)));
}
inline double shinge_grad(double u, double mu) {
  if (mu <= 0) return u > 0 ? 1.0 : 0.0;
  return 1.0 / (1.0 + std::exp(-u / mu));
}

inline double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

// One tanh hidden layer with a linear score (least-squares GAN). Blocks: U (h x d), a (h), v (h), b (1).
struct Discriminator {
  int u = -1, a = -1, v = -1, b = -1;

  void declare(ParamSet& ps, int d, int h) {
    u = ps.add("disc.U", h, d);
    a = ps.add("disc.a", h, 1);
    v = ps.add("disc.v", h, 1);
    b = ps.add("disc.b", 1, 1);
  }

  void init(ParamSet& ps, Rng& rng) const {
    const auto h = ps.val(u).rows(), d = ps.val(u).cols();
    std::normal_distribution<double> nu(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
    std::normal_distribution<double> nv(0.0, 1.0 / std::sqrt(static_cast<double>(h)));
    for (Eigen::Index i = 0; i < ps.val(u).size(); ++i) ps.val(u).data()[i] = nu(rng);
    for (Eigen::Index i = 0; i < h; ++i) ps.val(v)(i) = nv(rng);
  }

  struct Cache {
    Matrix hidden; // B x h
    Vector out;    // B
  };

  Vector forward(const ParamSet& ps, const Matrix& y, Cache* cache = nullptr) const {
    Matrix hid = ((y * ps.val(u).transpose()).rowwise() + ps.val(a).col(0).transpose()).array().tanh().matrix();
    Vector s = hid * ps.val(v).col(0);
    s.array() += ps.val(b)(0, 0);
    if (cache) {
      cache->hidden = std::move(hid);
      cache->out = s;
    }
    return s;
  }

  // Backpropagates dL/dp. Adds parameter gradients when `ps_grad` is set and
  // returns dL/dy.
  Matrix backward(const ParamSet& ps, ParamSet* ps_grad, const Matrix& y, const Cache& c, const Vector& dp) const {
    const Vector& ds = dp;
    const Matrix dpre = (ds * ps.val(v).col(0).transpose()).array() * (1 - c.hidden.array().square());
    if (ps_grad) {
      ps_grad->grad(v).col(0) += c.hidden.transpose() * ds;
      ps_grad->grad(b)(0, 0) += ds.sum();
      ps_grad->grad(u) += dpre.transpose() * y;
      ps_grad->grad(a).col(0) += dpre.colwise().sum().transpose();
    }
    return dpre * ps.val(u);
  }
};

// Least-squares discriminator loss 1/2 mean (D(real)-1)^2 + 1/2 mean D(fake)^2,
// with gradients into the discriminator blocks of `ps`.
inline double discriminator_step_loss(const Discriminator& disc, ParamSet& ps, const Matrix& real, const Matrix& fake, bool grad) {
  double loss = 0;
  Discriminator::Cache c;
  if (real.rows() > 0) {
    const Vector p = disc.forward(ps, real, &c);
    loss += 0.5 * (p.array() - 1).square().mean();
    if (grad) disc.backward(ps, &ps, real, c, ((p.array() - 1) / static_cast<double>(real.rows())).matrix());
  }
  if (fake.rows() > 0) {
    const Vector p = disc.forward(ps, fake, &c);
    loss += 0.5 * p.array().square().mean();
    if (grad) disc.backward(ps, &ps, fake, c, (p.array() / static_cast<double>(fake.rows())).matrix());
  }
  return loss;
}

// Generator-side adversarial term 1/2 mean (D(fake)-1)^2; returns dL/dfake.
inline double adversarial_loss(const Discriminator& disc, const ParamSet& ps, const Matrix& fake, Matrix* dfake) {
  if (fake.rows() == 0) {
    if (dfake) *dfake = Matrix::Zero(0, fake.cols());
    return 0;
  }
  Discriminator::Cache c;
  const Vector p = disc.forward(ps, fake, &c);
  if (dfake) *dfake = disc.backward(ps, nullptr, fake, c, ((p.array() - 1) / static_cast<double>(fake.rows())).matrix());
  return 0.5 * (p.array() - 1).square().mean();
}

inline Matrix softmax_rows(const Matrix& logits) {
  Matrix p = logits;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    p.row(i).array() -= p.row(i).maxCoeff();
    p.row(i) = p.row(i).array().exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

inline Matrix sample_rows(const Matrix& x, int n, Rng& rng) {
  std::uniform_int_distribution<Eigen::Index> pick(0, x.rows() - 1);
  Matrix out(n, x.cols());
  for (int i = 0; i < n; ++i) out.row(i) = x.row(pick(rng));
  return out;
}

inline void fill_normal(Matrix& m, double sd, Rng& rng) {
  std::normal_distribution<double> nd(0.0, sd);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
}

// Training-curve rows, one per logged step.
struct Curve {
  std::vector<std::string> columns; // after "step"
  std::vector<std::pair<int, std::vector<double>>> rows;

  void write_csv(std::ostream& os) const {
    os << "step";
    for (const auto& c : columns) os << ',' << c;
    os << '\n';
    for (const auto& [step, vals] : rows) {
      os << step;
      for (double v : vals) os << ',' << format_double(v);
      os << '\n';
    }
  }
};

// Single-start k-means centroids of the patients minus the control mean,
// one row per cluster; used to spread the initial mapping offsets.
inline Matrix centroid_offsets(const Matrix& controls, const Matrix& patients, int k, std::uint64_t seed) {
  const Matrix centres = eval::kmeans(patients, k, seed, 1).centers;
  return centres.rowwise() - controls.colwise().mean();
}

// Mean of column `col` over the last quarter of the logged rows.
inline double late_mean(const Curve& c, std::size_t col) {
  if (c.rows.empty()) return 0;
  const std::size_t from = c.rows.size() - std::max<std::size_t>(1, c.rows.size() / 4);
  double s = 0;
  for (std::size_t i = from; i < c.rows.size(); ++i) s += c.rows[i].second[col];
  return s / static_cast<double>(c.rows.size() - from);
}

inline void require_same_width(const Matrix& controls, const Matrix& patients) {
  if (controls.cols() != patients.cols()) throw DataError("controls and patients must share the column count");
  if (controls.rows() == 0 || patients.rows() == 0) throw DataError("training needs controls and patients");
  if (!controls.allFinite() || !patients.allFinite()) throw DataError("training data hold non-finite values");
}

} // namespace biobench::gan
