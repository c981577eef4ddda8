#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"
#include "biobench/core/rng.hpp"

namespace biobench::hydra {

// RBF kernel exp(-|xi - xj|^2 / (2 l^2)) with l = median pairwise distance.
inline Matrix rbf_kernel_median(const Matrix& points) {
  const Eigen::Index n = points.rows();
  Matrix d2(n, n);
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    d2(i, i) = 0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d2(i, j) = d2(j, i) = (points.row(i) - points.row(j)).squaredNorm();
      dists.push_back(std::sqrt(d2(i, j)));
    }
  }
  double ell = 1.0;
  if (!dists.empty()) {
    auto mid = dists.begin() + static_cast<long>(dists.size() / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    double median = *mid;
    if (dists.size() % 2 == 0) median = (median + *std::max_element(dists.begin(), mid)) / 2;
    if (median > 0) ell = median;
  }
  return (-d2.array() / (2 * ell * ell)).exp().matrix();
}

inline double log_det_subset(const Matrix& kernel, const std::vector<int>& subset) {
  const auto k = static_cast<Eigen::Index>(subset.size());
  Matrix sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = kernel(subset[a], subset[b]);
  Eigen::LLT<Matrix> llt(sub);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Matrix& l = llt.matrixL();
  double s = 0;
  for (Eigen::Index a = 0; a < k; ++a) {
    const double d = l(a, a);
    if (!(d > 0)) return -std::numeric_limits<double>::infinity();
    s += 2 * std::log(d);
  }
  return s;
}

// Greedy MAP selection of a K-subset under an L-ensemble DPP (incremental
// Cholesky), followed by single-swap refinement of log det(L_S).
//
// The first item maximizes the kernel diagonal; ties go to the item with the
// smallest total similarity to the rest, then to a seeded random pick.
inline std::vector<int> dpp_select_kernel(const Matrix& kernel, int k, std::uint64_t seed) {
  const int n = static_cast<int>(kernel.rows());
  if (k < 1) throw ConfigError("dpp_select needs K >= 1");
  if (k > n) throw ConfigError("dpp_select: K=" + std::to_string(k) + " exceeds point count " + std::to_string(n));

  constexpr double eps = 1e-12;
  const Vector diag = kernel.diagonal();
  const Vector rowsum = kernel.rowwise().sum();
  const double dmax = diag.maxCoeff();
  std::vector<int> tied;
  double best_rs = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (diag(i) < dmax - eps) continue;
    if (rowsum(i) < best_rs - eps) {
      best_rs = rowsum(i);
      tied = {i};
    } else if (rowsum(i) <= best_rs + eps) {
      tied.push_back(i);
    }
  }
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
  int j = tied[pick(rng)];

  std::vector<int> selected{j};
  Matrix c = Matrix::Zero(k, n);
  Vector d2 = diag;
  std::vector<char> taken(n, 0);
  taken[j] = 1;
  for (int it = 0; it + 1 < k; ++it) {
    const double dj = std::sqrt(std::max(d2(j), eps));
    const Eigen::RowVectorXd e =
        (kernel.row(j) - c.col(j).head(it).transpose() * c.topRows(it)) / dj;
    c.row(it) = e;
    d2 -= e.transpose().cwiseAbs2();
    int next = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      if (!taken[i] && d2(i) > best + eps) {
        best = d2(i);
        next = i;
      }
    j = next;
    taken[j] = 1;
    selected.push_back(j);
  }

  // Single-swap hill climbing on log det.
  double current = log_det_subset(kernel, selected);
  for (bool improved = true; improved;) {
    improved = false;
    for (int p = 0; p < k; ++p) {
      int best_i = -1;
      double best_val = current;
      for (int i = 0; i < n; ++i) {
        if (taken[i]) continue;
        std::vector<int> trial = selected;
        trial[p] = i;
        const double v = log_det_subset(kernel, trial);
        if (v > best_val + 1e-12) {
          best_val = v;
          best_i = i;
        }
      }
      if (best_i >= 0) {
        taken[selected[p]] = 0;
        taken[best_i] = 1;
        selected[p] = best_i;
        current = best_val;
        improved = true;
      }
    }
  }
  return selected;
}

inline std::vector<int> dpp_select(const Matrix& points, int k, std::uint64_t seed) {
  if (k > points.rows())
    throw ConfigError("dpp_select: K=" + std::to_string(k) + " exceeds point count " + std::to_string(points.rows()));
  return dpp_select_kernel(rbf_kernel_median(points), k, seed);
}

} // namespace biobench::hydra
