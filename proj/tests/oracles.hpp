#pragma once

// Independent reference implementations shared by the unit tests and the
// acceptance run. Nothing here calls into the library's algorithms.

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;

// Brute force over every injective map pred -> truth (pads the smaller side).
inline double brute_force_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  std::vector<int> pl = pred, tl = truth;
  std::sort(pl.begin(), pl.end());
  pl.erase(std::unique(pl.begin(), pl.end()), pl.end());
  std::sort(tl.begin(), tl.end());
  tl.erase(std::unique(tl.begin(), tl.end()), tl.end());
  const std::size_t n = std::max(pl.size(), tl.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long best = 0;
  do {
    long hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const auto p = std::lower_bound(pl.begin(), pl.end(), pred[i]) - pl.begin();
      const auto t = std::lower_bound(tl.begin(), tl.end(), truth[i]) - tl.begin();
      if (perm[p] == t) ++hits;
    }
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

// log10(E! / (t!)^n) from exact integers.
inline double exact_ordering_log10(int n_vars, int t) {
  using boost::multiprecision::cpp_int;
  cpp_int num = 1, den = 1;
  for (int i = 2; i <= n_vars * t; ++i) num *= i;
  cpp_int tf = 1;
  for (int i = 2; i <= t; ++i) tf *= i;
  for (int j = 0; j < n_vars; ++j) den *= tf;
  const cpp_int q = num / den;
  if (q * den != num) throw std::logic_error("multinomial division is not exact");
  // log10 via the decimal digit string keeps full precision.
  const std::string s = q.str();
  const double lead = std::stod(s.substr(0, 17)) / std::pow(10.0, std::min<std::size_t>(16, s.size() - 1));
  return std::log10(lead) + static_cast<double>(s.size() - 1);
}

// Single-threshold trajectories written out directly: variable j rises from
// 0 at stage 0 to 1 at its event position p_j, then to z_max at stage E.
inline Matrix trajectory(const std::vector<int>& order, double zmax) {
  const int e = static_cast<int>(order.size());
  Matrix mu(e + 1, e);
  for (int p = 0; p < e; ++p) {
    const int j = order[p], pos = p + 1;
    for (int s = 0; s <= e; ++s) {
      if (s <= pos) mu(s, j) = static_cast<double>(s) / pos;
      else mu(s, j) = 1 + (zmax - 1) * (s - pos) / static_cast<double>(e - pos);
    }
  }
  return mu;
}

inline double sequence_loglik(const Matrix& z, const std::vector<int>& order, double noise) {
  const Matrix mu = trajectory(order, 5);
  const int e = static_cast<int>(order.size());
  double total = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    double sum = 0;
    for (int s = 0; s <= e; ++s) {
      double p = 1;
      for (int j = 0; j < e; ++j) {
        const double r = (z(i, j) - mu(s, j)) / noise;
        p *= std::exp(-0.5 * r * r) / (noise * std::sqrt(2 * std::numbers::pi));
      }
      sum += p / (e + 1);
    }
    total += std::log(sum);
  }
  return total;
}

// Best single-threshold ordering by enumerating all of them.
inline std::vector<int> exhaustive_best_order(const Matrix& z, double noise) {
  std::vector<int> o(z.cols()), best;
  std::iota(o.begin(), o.end(), 0);
  double bl = -1e300;
  do {
    const double l = sequence_loglik(z, o, noise);
    if (l > bl) bl = l, best = o;
  } while (std::next_permutation(o.begin(), o.end()));
  return best;
}

inline Matrix simulate_stages(const std::vector<int>& order, int n, double noise, int min_stage, std::mt19937_64& g) {
  const Matrix mu = trajectory(order, 5);
  const int e = static_cast<int>(order.size());
  std::uniform_int_distribution<int> stage(min_stage, e);
  std::normal_distribution<double> eps(0, noise);
  Matrix z(n, e);
  for (int i = 0; i < n; ++i) {
    const int s = stage(g);
    for (int j = 0; j < e; ++j) z(i, j) = mu(s, j) + eps(g);
  }
  return z;
}

// RBF kernel with the median pairwise distance as length scale.
inline Matrix rbf_kernel(const Matrix& p) {
  std::vector<double> d;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = i + 1; j < p.rows(); ++j) d.push_back((p.row(i) - p.row(j)).norm());
  std::sort(d.begin(), d.end());
  const double l = d.size() % 2 ? d[d.size() / 2] : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);
  Matrix k(p.rows(), p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.rows(); ++j) k(i, j) = std::exp(-(p.row(i) - p.row(j)).squaredNorm() / (2 * l * l));
  return k;
}

inline double subset_det(const Matrix& k, const std::vector<int>& s) {
  Matrix sub(s.size(), s.size());
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = 0; b < s.size(); ++b) sub(a, b) = k(s[a], s[b]);
  return sub.determinant();
}

// Largest principal-minor determinant over all k-subsets.
inline double max_subset_det(const Matrix& k, int size) {
  const int n = static_cast<int>(k.rows());
  double best = -1;
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + size, true);
  do {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask[i]) s.push_back(i);
    best = std::max(best, subset_det(k, s));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

} // namespace oracle
