#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "biobench/evalharness.hpp"
#include "oracles.hpp"

using namespace biobench;
using namespace biobench::eval;
namespace fs = std::filesystem;

namespace {

std::vector<int> random_labels(int n, int k, std::mt19937_64& g) {
  std::uniform_int_distribution<int> d(1, k);
  std::vector<int> v(n);
  for (auto& x : v) x = d(g);
  return v;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("biobench_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST(Matching, HandWorked) {
  EXPECT_DOUBLE_EQ(matched_accuracy({1, 1, 2, 2}, {2, 2, 1, 1}).accuracy, 1.0);
  const auto r = matched_accuracy({1, 2, 3}, {1, 2, 2});
  EXPECT_NEAR(r.accuracy, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(r.confusion.rows(), 3);
  EXPECT_EQ(r.confusion.cols(), 2);
  EXPECT_EQ(r.permutation.size(), 2u);
  EXPECT_THROW(matched_accuracy({}, {}), DataError);
  EXPECT_THROW(matched_accuracy({1}, {1, 2}), DataError);
}

TEST(Matching, EqualsBruteForce) {
  std::mt19937_64 g(1);
  for (int inst = 0; inst < 200; ++inst) {
    const int kp = 1 + inst % 6, kt = 1 + (inst / 6) % 6;
    const int n = 5 + inst % 40;
    auto truth = random_labels(n, kt, g);
    auto pred = random_labels(n, kp, g);
    EXPECT_DOUBLE_EQ(matched_accuracy(pred, truth).accuracy, oracle::brute_force_accuracy(pred, truth)) << "instance " << inst;
  }
}

TEST(Matching, K4ThousandPoints) {
  std::mt19937_64 g(2);
  const auto truth = random_labels(1000, 4, g);
  auto pred = truth;
  for (int i = 0; i < 1000; i += 3) pred[i] = 1 + (pred[i] % 4);
  EXPECT_DOUBLE_EQ(matched_accuracy(pred, truth).accuracy, oracle::brute_force_accuracy(pred, truth));
}

TEST(Matching, SymmetricUnderRelabeling) {
  std::mt19937_64 g(3);
  for (int inst = 0; inst < 50; ++inst) {
    const auto truth = random_labels(60, 4, g);
    const auto pred = random_labels(60, 4, g);
    std::vector<int> map{1, 2, 3, 4};
    std::shuffle(map.begin(), map.end(), g);
    auto rp = pred, rt = truth;
    for (auto& x : rp) x = map[x - 1];
    std::shuffle(map.begin(), map.end(), g);
    for (auto& x : rt) x = map[x - 1];
    const double a = matched_accuracy(pred, truth).accuracy;
    EXPECT_DOUBLE_EQ(a, matched_accuracy(rp, truth).accuracy);
    EXPECT_DOUBLE_EQ(a, matched_accuracy(pred, rt).accuracy);
    EXPECT_DOUBLE_EQ(a, matched_accuracy(truth, pred).accuracy);
  }
}

TEST(Matching, RandomPredictionsApproachOneOverK) {
  std::mt19937_64 g(4);
  const int k = 3, n = 3000, reps = 40;
  std::vector<int> truth(n);
  for (int i = 0; i < n; ++i) truth[i] = 1 + i % k;
  double sum = 0, sq = 0;
  for (int r = 0; r < reps; ++r) {
    const double a = matched_accuracy(random_labels(n, k, g), truth).accuracy;
    sum += a;
    sq += a * a;
  }
  const double mean = sum / reps;
  const double sd = std::sqrt((sq - reps * mean * mean) / (reps - 1));
  // The max over bijections sits slightly above 1/K; bound the bias by the
  // per-cell binomial SD.
  const double bias = std::sqrt(1.0 / k * (1 - 1.0 / k) / n) * 2;
  EXPECT_NEAR(mean, 1.0 / k, 3 * sd / std::sqrt(reps) + bias);
}

TEST(PatternScore, Basics) {
  Matrix t(3, 4);
  t << 1, 2, 0, 0, 0, 0, 3, 1, 1, 0, 0, 1;
  Matrix rec = t;
  for (int r = 0; r < 3; ++r) rec.row(r).normalize();
  EXPECT_NEAR(pattern_score(rec, t), 1.0, 1e-12);
  Matrix perm(3, 4);
  perm << rec.row(2), rec.row(0), rec.row(1);
  EXPECT_NEAR(pattern_score(perm, t), 1.0, 1e-12);
  EXPECT_NEAR(pattern_score(perm, 7.5 * t), 1.0, 1e-12);

  Matrix a(1, 2), b(1, 2);
  a << 1, 0;
  b << 0, 5;
  EXPECT_NEAR(pattern_score(a, b), 0.0, 1e-15);
  EXPECT_THROW(pattern_score(a, Matrix::Zero(1, 2)), DataError);
}

TEST(KMeans, TwoBlobs) {
  std::mt19937_64 g(5);
  std::normal_distribution<double> e(0, 0.03);
  Matrix x(40, 2);
  std::vector<int> truth;
  for (int i = 0; i < 40; ++i) {
    const double c = i < 20 ? 10 : -10;
    x(i, 0) = c + e(g);
    x(i, 1) = e(g);
    truth.push_back(i < 20 ? 1 : 2);
  }
  EXPECT_DOUBLE_EQ(matched_accuracy(kmeans(x, 2, 1).labels, truth).accuracy, 1.0);
}

TEST(KMeans, IdenticalPoints) {
  const auto r = kmeans(Matrix::Constant(10, 3, 2.5), 2, 7);
  EXPECT_TRUE(std::all_of(r.labels.begin(), r.labels.end(), [&](int l) { return l == r.labels[0]; }));
  EXPECT_THROW(kmeans(Matrix::Zero(2, 2), 3, 0), ConfigError);
}

TEST(KMeans, BeatsRandomAssignments) {
  std::mt19937_64 g(6);
  std::normal_distribution<double> e(0, 1);
  Matrix x(50, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = e(g);
  const auto r = kmeans(x, 3, 11);
  double best_random = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 1000; ++t) best_random = std::min(best_random, wcss(x, random_labels(50, 3, g), 3));
  EXPECT_LE(r.wcss, best_random);
  EXPECT_NEAR(r.wcss, wcss(x, r.labels, 3), 1e-9);
}

TEST(KMeans, WcssNonIncreasing) {
  std::mt19937_64 g(7);
  std::normal_distribution<double> e(0, 1);
  for (int inst = 0; inst < 20; ++inst) {
    Matrix x(80, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = e(g);
    const auto r = kmeans(x, 4, inst, 3);
    for (std::size_t i = 1; i < r.wcss_trace.size(); ++i) EXPECT_LE(r.wcss_trace[i], r.wcss_trace[i - 1] + 1e-9);
  }
}

TEST(KMeans, Deterministic) {
  std::mt19937_64 g(8);
  std::normal_distribution<double> e(0, 1);
  Matrix x(60, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = e(g);
  EXPECT_EQ(kmeans(x, 3, 5).labels, kmeans(x, 3, 5).labels);
}

TEST(Gap, OneHotRIndicesAreSeparable) {
  const int n = 90;
  Matrix r = Matrix::Zero(n, 3), dirs = Matrix::Identity(3, 3);
  std::vector<int> truth(n);
  for (int i = 0; i < n; ++i) {
    truth[i] = 1 + i % 3;
    r(i, i % 3) = 1;
  }
  const auto g = rindex_cluster_gap(r, dirs, truth, Matrix::Identity(3, 3), 1);
  EXPECT_DOUBLE_EQ(g.individual_accuracy, 1.0);
  EXPECT_NEAR(g.pattern_score, 1.0, 1e-12);
}

TEST(Gap, UniformRIndicesAreChance) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0, 1);
  const int n = 600, reps = 20;
  std::vector<int> truth(n);
  for (int i = 0; i < n; ++i) truth[i] = 1 + i % 3;
  double sum = 0, sq = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Matrix r(n, 3);
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = u(gen);
    const double a = rindex_cluster_gap(r, Matrix::Identity(3, 3), truth, Matrix::Identity(3, 3), rep, 2).individual_accuracy;
    sum += a;
    sq += a * a;
  }
  const double mean = sum / reps, sd = std::sqrt((sq - reps * mean * mean) / (reps - 1));
  const double bias = 2 * std::sqrt(1.0 / 3 * (2.0 / 3) / n);
  EXPECT_NEAR(mean, 1.0 / 3, 3 * sd / std::sqrt(reps) + bias);
}

TEST(Toml, Subset) {
  const auto j = parse_toml(R"(# grid
algorithms = ["hydra", 'sustain']   # trailing comment
seeds = [1, 2,
  3,]
budget_seconds = 1.5e1
record_timing = true
big = 1_000
[sweep]
families = ["syn3"]
ks = [2, 3]
[params.hydra]
n_init = 5
inline = { a = 1, b.c = "x\ty" }
)");
  EXPECT_EQ(j["algorithms"], nlohmann::json({"hydra", "sustain"}));
  EXPECT_EQ(j["seeds"], nlohmann::json({1, 2, 3}));
  EXPECT_DOUBLE_EQ(j["budget_seconds"].get<double>(), 15.0);
  EXPECT_EQ(j["record_timing"], true);
  EXPECT_EQ(j["big"], 1000);
  EXPECT_EQ(j["sweep"]["ks"], nlohmann::json({2, 3}));
  EXPECT_EQ(j["params"]["hydra"]["n_init"], 5);
  EXPECT_EQ(j["params"]["hydra"]["inline"]["b"]["c"], "x\ty");
}

TEST(Toml, Errors) {
  for (const char* bad : {"a = 1\na = 2", "[t]\n[t]\nx=1", "[[arr]]", "a = \"\"\"x\"\"\"", "a = ", "a = [1, 2", "a = 1 b",
                          "a = \"open", "a = 12abc", "= 3"})
    EXPECT_THROW(parse_toml(bad), ConfigError) << bad;
  try {
    parse_toml("a = 1\n\nb = ?");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, JsonFallbackAndMissingFile) {
  EXPECT_EQ(parse_config_text("{\"seeds\": [1]}")["seeds"][0], 1);
  EXPECT_THROW(parse_config_text("{bad json"), ConfigError);
  EXPECT_THROW(load_config_file("/nonexistent/grid.toml"), ConfigError);
}

TEST(GridConfig, Validation) {
  const auto ok = grid_config_from_json(parse_toml(R"(
algorithms = ["hydra"]
seeds = [1]
[sweep]
families = ["syn3", "syn4"]
variants = ["widespread", "noise"]
ks = [2]
balances = ["equal", "unequal"]
)"));
  EXPECT_EQ(ok.datasets.size(), 8u);
  EXPECT_EQ(ok.datasets[0].name, "syn3-widespread-k2-equal");

  EXPECT_THROW(grid_config_from_json(parse_toml("algorithms = [\"hydra\"]\ndatasets = [\"syn1\"]")), ConfigError);
  EXPECT_THROW(grid_config_from_json(parse_toml("algorithms = [\"kmeans\"]\ndatasets = [\"syn1\"]\nseeds=[1]")), ConfigError);
  EXPECT_THROW(grid_config_from_json(parse_toml("algorithms = [\"hydra\"]\ndatasets = [\"syn9\"]\nseeds=[1]")), ConfigError);
  EXPECT_THROW(grid_config_from_json(parse_toml("algorithms = [\"hydra\"]\ndatasets = [\"syn1\"]\nseeds=[1]\ncolour=1")),
               ConfigError);
}

TEST(Overrides, UnknownKeyIsConfigError) {
  EXPECT_THROW(with_overrides(hydra::HydraConfig{}, {{"n_inits", 3}}, "hydra"), ConfigError);
  EXPECT_EQ(with_overrides(hydra::HydraConfig{}, {{"n_init", 3}}, "hydra").n_init, 3);
}

TEST(Grid, ZeroBudgetTimesOut) {
  GridConfig cfg;
  cfg.algorithms = {Algorithm::hydra};
  cfg.datasets = {dataset_spec("syn3-localized-k2-equal")};
  cfg.seeds = {1};
  cfg.budget_seconds = 0;
  const auto recs = run_grid(cfg);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].status, Status::timeout);
  EXPECT_FALSE(recs[0].accuracy.has_value());
}

TEST(Grid, OneHydraCell) {
  GridConfig cfg;
  cfg.algorithms = {Algorithm::hydra};
  cfg.datasets = {dataset_spec("syn1")};
  cfg.seeds = {7};
  cfg.params = {{"hydra", {{"n_init", 5}}}};
  const auto recs = run_grid(cfg);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].status, Status::ok);
  ASSERT_TRUE(recs[0].accuracy.has_value());
  EXPECT_GE(*recs[0].accuracy, 0.95);
  EXPECT_EQ(recs[0].axis(), "syn1/base/3");
}

TEST(Grid, FailedCellIsRecordedNotThrown) {
  GridConfig cfg;
  cfg.algorithms = {Algorithm::sustain};
  cfg.datasets = {dataset_spec("syn3-localized-k2-equal")};
  cfg.seeds = {1};
  cfg.params = {{"sustain", {{"noise", -1.0}}}};
  const auto recs = run_grid(cfg);
  EXPECT_EQ(recs[0].status, Status::failed);
  EXPECT_FALSE(recs[0].message.empty());
}

TEST(Grid, IndependentOfWorkerCount) {
  GridConfig cfg;
  cfg.algorithms = {Algorithm::hydra};
  cfg.datasets = {dataset_spec("syn3-localized-k2-equal"), dataset_spec("syn4-localized-k2-equal")};
  cfg.seeds = {1, 2};
  cfg.params = {{"hydra", {{"n_init", 3}, {"max_iter", 10}}}};
  auto a = run_grid(cfg);
  cfg.workers = 3;
  auto b = run_grid(cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i].wall_ms = b[i].wall_ms = 0;
    a[i].peak_mem_bytes = b[i].peak_mem_bytes = 0;
    EXPECT_TRUE(a[i] == b[i]) << i;
  }
}

namespace {

std::vector<BenchmarkRecord> sample_records() {
  std::vector<BenchmarkRecord> recs;
  const char* variants[] = {"widespread-equal", "noise-equal", "subtle-unequal"};
  for (int i = 0; i < 3; ++i) {
    BenchmarkRecord r;
    r.algorithm = "hydra";
    r.preset = "syn3";
    r.variant = variants[i];
    r.k = 2;
    r.seed = 4;
    r.accuracy = 0.5 + 0.1 * i + 1.0 / 3.0;
    r.wall_ms = 12.25;
    r.peak_mem_bytes = 1 << 20;
    recs.push_back(r);
  }
  return recs;
}

} // namespace

TEST(Report, CsvAndJsonlRoundTrip) {
  auto recs = sample_records();
  recs[1].pattern_score = -0.125;
  recs[2].status = Status::failed;
  recs[2].accuracy.reset();
  recs[2].message = "boom, \"quoted\"";
  std::stringstream csv;
  write_results_csv(csv, recs, true);
  const auto back = read_results_csv(csv);
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    auto expect = recs[i];
    expect.message.clear(); // jsonl only
    EXPECT_TRUE(back[i] == expect) << i;
  }
  std::stringstream jl;
  write_jsonl(jl, recs);
  EXPECT_EQ(read_jsonl(jl), recs);
}

TEST(Report, TimingColumnsEmptyByDefault) {
  std::stringstream csv;
  write_results_csv(csv, sample_records(), false);
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header, kResultsHeader);
  EXPECT_NE(row.find(",,,ok"), std::string::npos) << row;
}

TEST(Report, OneSvgWithThreeAxes) {
  const auto dir = scratch("report3");
  const auto rep = emit_report(sample_records(), dir);
  ASSERT_EQ(rep.series.size(), 1u);
  const std::string svg = slurp(dir / "radar_hydra.svg");
  std::size_t axes = 0;
  for (std::size_t p = 0; (p = svg.find("class=\"axis\"", p)) != std::string::npos; ++p) ++axes;
  EXPECT_EQ(axes, 3u);
  EXPECT_NE(svg.find("viewBox=\"0 0 600 600\""), std::string::npos);
  EXPECT_NE(svg.find("syn3/noise-equal/2"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "results.csv"));
  EXPECT_TRUE(fs::exists(dir / "results.jsonl"));
}

TEST(Report, FailedAxisOmitted) {
  auto recs = sample_records();
  recs[1].status = Status::failed;
  recs[1].accuracy.reset();
  auto extra = recs[0];
  extra.seed = 5;
  extra.status = Status::timeout;
  extra.accuracy.reset();
  recs.push_back(extra); // one seed of axis 0 timed out: the whole axis goes
  const auto axes = radar_axes(recs, "hydra");
  ASSERT_EQ(axes.size(), 1u);
  EXPECT_EQ(axes[0].first, "syn3/subtle-unequal/2");
  const std::string svg = radar_svg("hydra", axes);
  EXPECT_EQ(svg.find("noise-equal"), std::string::npos);
  EXPECT_EQ(svg.find("widespread-equal"), std::string::npos);
}

TEST(Report, RecordInvariants) {
  BenchmarkRecord r;
  r.status = Status::ok;
  EXPECT_THROW(r.validate(), DataError);
  r.accuracy = 1;
  r.wall_ms = -1;
  EXPECT_THROW(r.validate(), DataError);
  EXPECT_THROW(emit_report({}, scratch("empty")), DataError);
}
