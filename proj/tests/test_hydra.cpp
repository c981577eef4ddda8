#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "biobench/datagen.hpp"
#include "biobench/eval/matching.hpp"
#include "biobench/hydra.hpp"
#include "oracles.hpp"

using namespace biobench;
using namespace biobench::hydra;

namespace {

SvmResult train(const Matrix& x, const std::vector<int>& y, double c) {
  std::vector<double> w(y.size(), 1.0);
  return train_hyperplane(x, y, w, c, 1e-8);
}

double primal(double w1, double w2, double b, const Matrix& x, const std::vector<int>& y, double c) {
  double obj = 0.5 * (w1 * w1 + w2 * w2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) obj += c * std::max(0.0, 1 - y[i] * (w1 * x(i, 0) + w2 * x(i, 1) + b));
  return obj;
}

// Coarse grid followed by shrinking local grids: an independent minimizer
// of the convex primal.
double grid_optimum(const Matrix& x, const std::vector<int>& y, double c) {
  double cw1 = 0, cw2 = 0, cb = 0, step = 0.5, best = primal(0, 0, 0, x, y, c);
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j)
      for (int k = -20; k <= 20; ++k) {
        const double v = primal(i * step, j * step, k * step, x, y, c);
        if (v < best) best = v, cw1 = i * step, cw2 = j * step, cb = k * step;
      }
  for (int round = 0; round < 40; ++round) {
    step *= 0.7;
    const double b1 = cw1, b2 = cw2, bb = cb;
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j)
        for (int k = -4; k <= 4; ++k) {
          const double v = primal(b1 + i * step, b2 + j * step, bb + k * step, x, y, c);
          if (v < best) best = v, cw1 = b1 + i * step, cw2 = b2 + j * step, cb = bb + k * step;
        }
  }
  return best;
}

std::vector<int> noisy_copy(const std::vector<int>& base, int k, double rate, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> lab(1, k);
  auto out = base;
  for (auto& l : out)
    if (u(g) < rate) l = lab(g);
  return out;
}

} // namespace

TEST(Svm, SymmetricPair) {
  Matrix x(2, 2);
  x << 1, 0, -1, 0;
  const auto r = train(x, {1, -1}, 100);
  EXPECT_NEAR(r.plane.w(0), 1.0, 1e-6);
  EXPECT_NEAR(r.plane.w(1), 0.0, 1e-9);
  EXPECT_NEAR(r.plane.b, 0.0, 1e-6);
  EXPECT_NEAR(r.plane.score(x.row(0).transpose()), 1.0, 1e-6);
  EXPECT_NEAR(r.plane.score(x.row(1).transpose()), -1.0, 1e-6);
}

TEST(Svm, DegenerateInputs) {
  Matrix x(2, 2);
  x << 1, 0, -1, 0;
  std::vector<int> y{1, -1};
  std::vector<double> w{1.0, 0.0};
  EXPECT_ANY_THROW(train_hyperplane(x, y, w, 1.0));
  Matrix bad = x;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(train(bad, y, 1.0), DataError);
}

TEST(Svm, MatchesGridSearchOptimum) {
  std::mt19937_64 g(3);
  std::normal_distribution<double> e(0, 0.6);
  for (int inst = 0; inst < 5; ++inst) {
    const int n = 12;
    Matrix x(n, 2);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      y[i] = i % 2 ? 1 : -1;
      x(i, 0) = 1.5 * y[i] + e(g);
      x(i, 1) = 0.5 * y[i] + e(g);
    }
    const double c = 0.5;
    const auto r = train(x, y, c);
    const double oracle = grid_optimum(x, y, c);
    EXPECT_NEAR(r.objective, primal(r.plane.w(0), r.plane.w(1), r.plane.b, x, y, c), 1e-9);
    EXPECT_NEAR(r.objective, oracle, 1e-3) << "instance " << inst;
  }
}

TEST(Svm, SeparableHasZeroHinge) {
  std::mt19937_64 g(4);
  std::normal_distribution<double> e(0, 0.3);
  Matrix x(20, 2);
  std::vector<int> y(20);
  for (int i = 0; i < 20; ++i) {
    y[i] = i < 10 ? 1 : -1;
    x(i, 0) = 3 * y[i] + e(g);
    x(i, 1) = e(g);
  }
  const auto r = train(x, y, 10);
  for (int i = 0; i < 20; ++i) EXPECT_GE(y[i] * r.plane.score(x.row(i).transpose()), 1 - 1e-6);
  EXPECT_NEAR(r.objective, 0.5 * r.plane.w.squaredNorm(), 1e-6);
}

TEST(Dpp, Collinear) {
  Matrix p(3, 1);
  p << 0, 1, 10;
  auto s = dpp_select(p, 2, 1);
  std::sort(s.begin(), s.end());
  EXPECT_EQ(s, (std::vector<int>{0, 2}));
}

TEST(Dpp, NeverPicksDuplicatePair) {
  std::mt19937_64 g(5);
  std::normal_distribution<double> e(0, 1);
  for (int inst = 0; inst < 20; ++inst) {
    Matrix p(6, 2);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = e(g);
    p.row(5) = p.row(2);
    auto s = dpp_select(p, 2, inst);
    std::sort(s.begin(), s.end());
    EXPECT_NE(s, (std::vector<int>{2, 5}));
  }
}

TEST(Dpp, AllPointsAndErrors) {
  Matrix p(4, 2);
  p << 0, 0, 1, 0, 0, 1, 1, 1;
  auto s = dpp_select(p, 4, 3);
  std::sort(s.begin(), s.end());
  EXPECT_EQ(s, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_THROW(dpp_select(p, 5, 0), ConfigError);
}

TEST(Dpp, MatchesBruteForceMaxDeterminant) {
  std::mt19937_64 g(6);
  std::normal_distribution<double> e(0, 1);
  int matches = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const int n = 5 + inst % 6, k = 1 + inst % 3;
    Matrix p(n, 3);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = e(g);
    const Matrix ker = oracle::rbf_kernel(p);
    const double best = oracle::max_subset_det(ker, k);
    const double got = oracle::subset_det(ker, dpp_select(p, k, inst));
    if (got >= best * (1 - 1e-9)) ++matches;
  }
  EXPECT_GE(matches, 18);
}

TEST(Polytope, Assign) {
  Polytope one{{Hyperplane{Vector::Ones(2), 0.3}}};
  Matrix x(3, 2);
  x << 1, 2, -4, 0, 0.5, 0.5;
  EXPECT_EQ(polytope_assign(one, x), (std::vector<int>{1, 1, 1}));

  Vector e1 = Vector::Zero(2);
  e1(0) = 1;
  Polytope two{{Hyperplane{e1, 0}, Hyperplane{-e1, 0}}};
  Matrix pt(1, 2);
  pt << 2, 7;
  EXPECT_EQ(polytope_assign(two, pt), (std::vector<int>{1}));
  Matrix tie(1, 2);
  tie << 0, 3;
  EXPECT_EQ(polytope_assign(two, tie), (std::vector<int>{1}));
  EXPECT_THROW(polytope_assign(two, Matrix::Zero(1, 3)), DataError);
}

TEST(Polytope, ScaleInvariant) {
  std::mt19937_64 g(7);
  std::normal_distribution<double> e(0, 1);
  Polytope p;
  for (int k = 0; k < 4; ++k) {
    Vector w(3);
    for (auto& v : w) v = e(g);
    p.faces.push_back({w, e(g)});
  }
  Matrix x(50, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = e(g);
  Polytope q = p;
  for (auto& f : q.faces) {
    f.w *= 3.7;
    f.b *= 3.7;
  }
  EXPECT_EQ(polytope_assign(p, x), polytope_assign(q, x));
}

TEST(Consensus, IdenticalAndPermutedRuns) {
  std::mt19937_64 g(8);
  std::vector<int> base(60);
  for (int i = 0; i < 60; ++i) base[i] = 1 + (i * 7) % 3;
  std::vector<std::vector<int>> same(5, base);
  EXPECT_DOUBLE_EQ(eval::matched_accuracy(consensus_aggregate(same, 3, 1), base).accuracy, 1.0);

  auto perm = base;
  for (auto& l : perm) l = l % 3 + 1;
  const Matrix m = coassignment_matrix({base, perm});
  EXPECT_TRUE(((m.array() == 0) || (m.array() == 1)).all());
  EXPECT_DOUBLE_EQ(eval::matched_accuracy(consensus_aggregate({base, perm}, 3, 2), perm).accuracy, 1.0);
}

TEST(Consensus, RecoversNoisyBlocks) {
  std::mt19937_64 g(9);
  std::vector<int> truth(90);
  for (int i = 0; i < 90; ++i) truth[i] = 1 + i / 30;
  std::vector<std::vector<int>> runs;
  for (int r = 0; r < 20; ++r) runs.push_back(noisy_copy(truth, 3, 0.1, g));
  EXPECT_DOUBLE_EQ(eval::matched_accuracy(consensus_aggregate(runs, 3, 4), truth).accuracy, 1.0);
}

TEST(Consensus, CoassignmentProperties) {
  std::mt19937_64 g(10);
  std::vector<std::vector<int>> runs;
  std::vector<int> base(25, 1);
  for (int r = 0; r < 7; ++r) runs.push_back(noisy_copy(base, 4, 0.9, g));
  const Matrix m = coassignment_matrix(runs);
  EXPECT_TRUE(m.isApprox(m.transpose()));
  EXPECT_TRUE((m.diagonal().array() == 1).all());
  EXPECT_GE(m.minCoeff(), 0.0);
  EXPECT_LE(m.maxCoeff(), 1.0);
}

TEST(Hydra, KOneIsSingleClassifier) {
  const auto ds = datagen::make_preset("syn3-localized-k2-equal", 1);
  HydraConfig cfg;
  cfg.k = 1;
  const auto fit = fit_hydra(ds, cfg);
  EXPECT_TRUE(std::all_of(fit.labels.begin(), fit.labels.end(), [](int l) { return l == 1; }));
  ASSERT_EQ(fit.polytope.k(), 1);
}

TEST(Hydra, Syn1Accurate) {
  const auto ds = datagen::make_preset("syn1", 7);
  HydraConfig cfg;
  cfg.k = 3;
  cfg.seed = 1;
  const auto fit = fit_hydra(ds, cfg);
  EXPECT_GE(eval::matched_accuracy(fit.labels, ds.truth->labels).accuracy, 0.95);
  for (const auto& t : fit.traces)
    for (std::size_t i = 1; i < t.objective.size(); ++i)
      EXPECT_LE(t.objective[i], t.objective[i - 1] * (1 + cfg.tol) + cfg.tol);

  // Truth relabeling leaves the score unchanged.
  auto relabeled = ds.truth->labels;
  for (auto& l : relabeled) l = 4 - l;
  EXPECT_DOUBLE_EQ(eval::matched_accuracy(fit.labels, relabeled).accuracy,
                   eval::matched_accuracy(fit.labels, ds.truth->labels).accuracy);
}

// No per-variant target; only require a clear margin over the 0.5 chance level.
TEST(Hydra, Syn3WidespreadK2AboveChance) {
  const auto ds = datagen::make_preset("syn3-widespread-k2-equal", 7);
  HydraConfig cfg;
  cfg.k = 2;
  cfg.seed = 1;
  const auto fit = fit_hydra(ds, cfg);
  EXPECT_GE(eval::matched_accuracy(fit.labels, ds.truth->labels).accuracy, 0.75);
}

TEST(Hydra, DeterministicAcrossWorkerCounts) {
  const auto ds = datagen::make_preset("syn3-localized-k3-equal", 2);
  HydraConfig cfg;
  cfg.k = 3;
  cfg.n_init = 6;
  cfg.seed = 5;
  const auto a = fit_hydra(ds, cfg);
  cfg.workers = 3;
  const auto b = fit_hydra(ds, cfg);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(fit_report(a).dump(), fit_report(b).dump());
}

TEST(Hydra, RowOrderDoesNotChangeSyn1Score) {
  const auto ds = datagen::make_preset("syn1", 7);
  // Reverse the patient block.
  auto shuffled = ds;
  const auto rows = ds.patient_rows();
  std::vector<int> order = ds.control_rows();
  order.insert(order.end(), rows.rbegin(), rows.rend());
  shuffled.data = ds.data.subset(order);
  shuffled.truth->labels.assign(ds.truth->labels.rbegin(), ds.truth->labels.rend());
  shuffled.truth->severity = ds.truth->severity.colwise().reverse();
  HydraConfig cfg;
  cfg.k = 3;
  cfg.seed = 1;
  const double a = eval::matched_accuracy(fit_hydra(ds, cfg).labels, ds.truth->labels).accuracy;
  const double b = eval::matched_accuracy(fit_hydra(shuffled, cfg).labels, shuffled.truth->labels).accuracy;
  EXPECT_DOUBLE_EQ(a, b);
}

TEST(Hydra, ConfigErrors) {
  const auto ds = datagen::make_preset("syn3-localized-k2-equal", 1);
  HydraConfig cfg;
  cfg.c = 0;
  EXPECT_THROW(fit_hydra(ds, cfg), ConfigError);
  cfg = HydraConfig{};
  cfg.dpp_fraction = 0;
  EXPECT_THROW(fit_hydra(ds, cfg), ConfigError);
}
