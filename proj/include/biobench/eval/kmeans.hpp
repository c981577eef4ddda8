#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"
#include "biobench/core/rng.hpp"

namespace biobench::eval {

struct KMeansResult {
  std::vector<int> labels; // 1..k
  Matrix centers;          // k x dims
  double wcss = 0;
  int iterations = 0;
  std::vector<double> wcss_trace; // winning run, one entry per Lloyd step
};

namespace detail {

inline double squared_distance(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

// Greedy k-means++: each new center is the best of 2 + floor(ln k) candidates
// drawn proportionally to squared distance.
inline Matrix greedy_kmeanspp(const Matrix& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Matrix centers(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = x.row(pick(rng));

  Vector d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = detail::squared_distance(x, i, centers, 0);

  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index best = -1;
    double best_potential = std::numeric_limits<double>::infinity();
    Vector best_d2;
    for (int t = 0; t < trials; ++t) {
      Eigen::Index cand = 0;
      if (total > 0) {
        double target = unit(rng) * total;
        for (cand = 0; cand < n - 1; ++cand) {
          target -= d2(cand);
          if (target <= 0) break;
        }
      }
      Vector nd2(n);
      for (Eigen::Index i = 0; i < n; ++i) nd2(i) = std::min(d2(i), (x.row(i) - x.row(cand)).squaredNorm());
      const double potential = nd2.sum();
      if (potential < best_potential) {
        best_potential = potential;
        best = cand;
        best_d2 = std::move(nd2);
      }
    }
    centers.row(c) = x.row(best);
    d2 = std::move(best_d2);
  }
  return centers;
}

inline KMeansResult lloyd(const Matrix& x, Matrix centers, int max_iter) {
  const Eigen::Index n = x.rows();
  const int k = static_cast<int>(centers.rows());
  KMeansResult r;
  r.labels.assign(n, 0);
  std::vector<int> prev(n, -1);
  for (int it = 0; it < max_iter; ++it) {
    double wcss = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = squared_distance(x, i, centers, c);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      r.labels[i] = best;
      wcss += bd;
    }
    r.wcss_trace.push_back(wcss);
    r.wcss = wcss;
    r.iterations = it + 1;
    if (r.labels == prev) break;
    prev = r.labels;

    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(r.labels[i]) += x.row(i);
      ++counts[r.labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(c) = sums.row(c) / counts[c];
        continue;
      }
      // Empty cluster: move its center to the point farthest from its own center.
      Eigen::Index far = 0;
      double fd = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = squared_distance(x, i, centers, r.labels[i]);
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      centers.row(c) = x.row(far);
    }
  }
  r.centers = std::move(centers);
  for (auto& l : r.labels) ++l;
  return r;
}

} // namespace detail

// Lloyd's algorithm from greedy k-means++ seeds; best of n_init restarts by
// within-cluster sum of squares. Deterministic for a given seed.
inline KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int n_init = 10, int max_iter = 300) {
  if (k < 1) throw ConfigError("kmeans needs k >= 1");
  if (k > points.rows()) throw ConfigError("kmeans: k=" + std::to_string(k) + " exceeds point count " +
                                           std::to_string(points.rows()));
  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int run = 0; run < std::max(1, n_init); ++run) {
    Rng rng = make_rng(seed, run);
    KMeansResult r = detail::lloyd(points, detail::greedy_kmeanspp(points, k, rng), max_iter);
    if (r.wcss < best.wcss) best = std::move(r);
  }
  return best;
}

inline double wcss(const Matrix& points, const std::vector<int>& labels, int k) {
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<int> counts(k, 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(labels[i] - 1) += points.row(i);
    ++counts[labels[i] - 1];
  }
  double total = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int c = labels[i] - 1;
    total += (points.row(i) - sums.row(c) / counts[c]).squaredNorm();
  }
  return total;
}

} // namespace biobench::eval
