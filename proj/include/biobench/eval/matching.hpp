#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "biobench/core/error.hpp"
#include "biobench/core/numeric.hpp"

namespace biobench::eval {

// Minimum-cost assignment of rows to columns (Hungarian / Kuhn-Munkres,
// O(n^2 m)). Requires rows <= cols. Returns the column for each row.
inline std::vector<int> hungarian_min(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  if (n > m) throw Error("hungarian_min needs rows <= cols");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

// Maximum-weight assignment for any shape; unmatched rows map to -1.
inline std::vector<int> hungarian_max(const Matrix& weight) {
  if (weight.rows() <= weight.cols()) return hungarian_min(-weight);
  const auto by_col = hungarian_min(-weight.transpose());
  std::vector<int> out(weight.rows(), -1);
  for (std::size_t c = 0; c < by_col.size(); ++c) out[by_col[c]] = static_cast<int>(c);
  return out;
}

struct MatchResult {
  double accuracy = 0;
  // Predicted label -> truth label for the matched pairs.
  std::map<int, int> permutation;
  std::vector<int> pred_labels;  // row order of `confusion`
  std::vector<int> truth_labels; // column order of `confusion`
  Matrix confusion;              // K_pred x K_true counts
};

inline std::vector<int> distinct_sorted(const std::vector<int>& v) {
  std::vector<int> out(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline Matrix confusion_matrix(const std::vector<int>& pred, const std::vector<int>& truth, const std::vector<int>& pl,
                               const std::vector<int>& tl) {
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(pl.size()), static_cast<Eigen::Index>(tl.size()));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto r = std::lower_bound(pl.begin(), pl.end(), pred[i]) - pl.begin();
    const auto col = std::lower_bound(tl.begin(), tl.end(), truth[i]) - tl.begin();
    c(r, col) += 1.0;
  }
  return c;
}

// Label accuracy maximized over bijections between predicted and true labels.
inline MatchResult matched_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.empty()) throw DataError("matched_accuracy needs at least one label");
  if (pred.size() != truth.size()) throw DataError("prediction and truth lengths differ");
  MatchResult r;
  r.pred_labels = distinct_sorted(pred);
  r.truth_labels = distinct_sorted(truth);
  r.confusion = confusion_matrix(pred, truth, r.pred_labels, r.truth_labels);
  const auto assign = hungarian_max(r.confusion);
  double hit = 0;
  for (std::size_t p = 0; p < assign.size(); ++p) {
    if (assign[p] < 0) continue;
    r.permutation[r.pred_labels[p]] = r.truth_labels[assign[p]];
    hit += r.confusion(static_cast<Eigen::Index>(p), assign[p]);
  }
  r.accuracy = hit / static_cast<double>(pred.size());
  return r;
}

// Mean cosine similarity between recovered unit directions (rows) and truth
// vectors (rows) under the best one-to-one matching.
inline double pattern_score(const Matrix& recovered, const Matrix& truth) {
  if (recovered.rows() != truth.rows()) throw DataError("pattern_score needs equal counts of directions and truth vectors");
  if (recovered.rows() == 0) throw DataError("pattern_score needs at least one direction");
  if (recovered.cols() != truth.cols()) throw DataError("pattern_score dimension mismatch");
  Matrix cos(recovered.rows(), truth.rows());
  for (Eigen::Index t = 0; t < truth.rows(); ++t)
    if (!(truth.row(t).norm() > 0)) throw DataError("pattern_score: truth vector " + std::to_string(t + 1) + " has zero norm");
  for (Eigen::Index r = 0; r < recovered.rows(); ++r) {
    const double rn = recovered.row(r).norm();
    for (Eigen::Index t = 0; t < truth.rows(); ++t)
      cos(r, t) = rn > 0 ? recovered.row(r).dot(truth.row(t)) / (rn * truth.row(t).norm()) : 0.0;
  }
  const auto assign = hungarian_max(cos);
  double sum = 0;
  for (std::size_t r = 0; r < assign.size(); ++r) sum += cos(static_cast<Eigen::Index>(r), assign[r]);
  return sum / static_cast<double>(assign.size());
}

} // namespace biobench::eval
