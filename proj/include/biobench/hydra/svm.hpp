#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"

namespace biobench::hydra {

struct Hyperplane {
  Vector w;
  double b = 0;

  double score(const Eigen::Ref<const Vector>& x) const { return w.dot(x) + b; }
};

struct SvmResult {
  Hyperplane plane;
  double objective = 0; // primal: 0.5|w|^2 + sum_i C_i hinge
  int iterations = 0;
  bool converged = false;
};

// Primal objective 0.5|w|^2 + sum_i C_i * max(0, 1 - y_i (w.x_i + b)).
inline double svm_objective(const Hyperplane& h, const Matrix& x, std::span<const int> rows, std::span<const int> y,
                            std::span<const double> cost) {
  double obj = 0.5 * h.w.squaredNorm();
  for (std::size_t t = 0; t < rows.size(); ++t)
    obj += cost[t] * std::max(0.0, 1.0 - y[t] * (x.row(rows[t]).dot(h.w) + h.b));
  return obj;
}

// Soft-margin linear SVM with an unregularized bias, solved in the dual by
// SMO with second-order working-set selection. `gram` is the full Gram
// matrix of `x`; the problem uses the subset `rows` with labels `y` (+1/-1)
// and per-sample upper bounds `cost` (C times the sample weight). Samples with
// zero cost are dropped. Stops when the maximal KKT violation is below `tol`.
inline SvmResult train_hyperplane_gram(const Matrix& x, const Matrix& gram, std::span<const int> rows_in,
                                       std::span<const int> y_in, std::span<const double> cost_in, double tol) {
  std::vector<int> rows, y;
  std::vector<double> cap;
  int pos = 0, neg = 0;
  for (std::size_t t = 0; t < rows_in.size(); ++t) {
    if (!(cost_in[t] > 0)) continue;
    rows.push_back(rows_in[t]);
    y.push_back(y_in[t] > 0 ? 1 : -1);
    cap.push_back(cost_in[t]);
    (y.back() > 0 ? pos : neg)++;
  }
  if (pos == 0 || neg == 0) throw DataError("degenerate input: max-margin training needs weighted samples of both labels");

  const int n = static_cast<int>(rows.size());
  constexpr double tau = 1e-12;
  std::vector<double> alpha(n, 0.0), grad(n, -1.0), qd(n);
  for (int t = 0; t < n; ++t) qd[t] = gram(rows[t], rows[t]);
  auto kern = [&](int a, int b) { return gram(rows[a], rows[b]); };
  auto upper = [&](int t) { return alpha[t] >= cap[t]; };
  auto lower = [&](int t) { return alpha[t] <= 0; };

  SvmResult res;
  const long max_iter = std::max<long>(100000, 100L * n);
  long iter = 0;
  for (; iter < max_iter; ++iter) {
    // Working set: i maximizes -y G over I_up, j minimizes the second-order gain.
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    int i = -1;
    for (int t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (!upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          i = t;
        }
      } else if (!lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        i = t;
      }
    }
    int j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (lower(t)) continue;
        const double diff = gmax + grad[t];
        gmax2 = std::max(gmax2, grad[t]);
        if (diff > 0 && i >= 0) {
          double quad = qd[i] + qd[t] - 2.0 * kern(i, t);
          if (quad <= 0) quad = tau;
          const double gain = -(diff * diff) / quad;
          if (gain <= best) {
            best = gain;
            j = t;
          }
        }
      } else {
        if (upper(t)) continue;
        const double diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        if (diff > 0 && i >= 0) {
          double quad = qd[i] + qd[t] - 2.0 * kern(i, t);
          if (quad <= 0) quad = tau;
          const double gain = -(diff * diff) / quad;
          if (gain <= best) {
            best = gain;
            j = t;
          }
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < tol) {
      res.converged = true;
      break;
    }

    const double ci = cap[i], cj = cap[j];
    const double old_i = alpha[i], old_j = alpha[j];
    const double qij = y[i] * y[j] * kern(i, j);
    if (y[i] != y[j]) {
      double quad = qd[i] + qd[j] + 2 * qij;
      if (quad <= 0) quad = tau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > ci - cj) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = ci - diff;
        }
      } else if (alpha[j] > cj) {
        alpha[j] = cj;
        alpha[i] = cj + diff;
      }
    } else {
      double quad = qd[i] + qd[j] - 2 * qij;
      if (quad <= 0) quad = tau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > ci) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = sum - ci;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > cj) {
        if (alpha[j] > cj) {
          alpha[j] = cj;
          alpha[i] = sum - cj;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }

    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (int t = 0; t < n; ++t)
      grad[t] += y[t] * (y[i] * kern(i, t) * di + y[j] * kern(j, t) * dj);
  }
  res.iterations = static_cast<int>(iter);

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, free_sum = 0;
  int n_free = 0;
  for (int t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / n_free : (ub + lb) / 2;

  res.plane.w = Vector::Zero(x.cols());
  for (int t = 0; t < n; ++t)
    if (alpha[t] != 0) res.plane.w += alpha[t] * y[t] * x.row(rows[t]).transpose();
  res.plane.b = -rho;
  res.objective = svm_objective(res.plane, x, rows, y, cap);
  return res;
}

// Convenience entry point for a standalone problem: X rows with +/-1 labels,
// per-sample weights (scaled by C).
inline SvmResult train_hyperplane(const Matrix& x, std::span<const int> y, std::span<const double> sample_weights,
                                  double c, double tol = 1e-4) {
  if (!x.allFinite()) throw DataError("non-finite features");
  if (static_cast<Eigen::Index>(y.size()) != x.rows() || sample_weights.size() != y.size())
    throw DataError("label and weight counts must match the sample count");
  if (!(c > 0)) throw ConfigError("C must be positive");
  const Matrix gram = x * x.transpose();
  std::vector<int> rows(x.rows());
  std::vector<double> cost(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    rows[i] = static_cast<int>(i);
    cost[i] = c * sample_weights[i];
  }
  return train_hyperplane_gram(x, gram, rows, y, cost, tol);
}

} // namespace biobench::hydra
