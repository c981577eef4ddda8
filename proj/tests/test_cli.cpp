#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("biobench_cli_" + name);
  fs::remove_all(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(BIOBENCH_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

} // namespace

TEST(Cli, GenWritesDatasetSidecarAndManifest) {
  const auto dir = scratch("gen");
  ASSERT_EQ(run("gen --preset syn1 --seed 7 --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "syn1.csv"));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 3);
}

TEST(Cli, GenWithoutSeedIsConfigError) { EXPECT_EQ(run("gen --preset syn1 --out " + scratch("noseed").string()), 1); }

TEST(Cli, UnknownPresetIsConfigError) { EXPECT_EQ(run("gen --preset syn9 --seed 1 --out " + scratch("bad").string()), 1); }

TEST(Cli, BenchWithMissingConfigIsConfigError) {
  EXPECT_EQ(run("bench --config /nonexistent/grid.toml --out " + scratch("bench").string()), 1);
}

TEST(Cli, MalformedBudgetIsConfigError) {
  EXPECT_EQ(run("probe-sustain --vars 3 --budget soon --out " + scratch("budget").string()), 1);
}

TEST(Cli, ProbeWritesOneRowPerCount) {
  const auto dir = scratch("probe");
  ASSERT_EQ(run("probe-sustain --vars 3,5,8 --budget 60s --subjects 50 --em-iterations 1 --out " + dir.string()), 0);
  const auto rows = lines(dir / "sustain_probe.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "n_vars,log10_orderings,iter_ms,status");
  double prev = -1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::stringstream ss(rows[i]);
    std::string n, lg;
    std::getline(ss, n, ',');
    std::getline(ss, lg, ',');
    EXPECT_GT(std::stod(lg), prev);
    prev = std::stod(lg);
  }
}

TEST(Cli, FitThenScoreAgree) {
  const auto dir = scratch("fit");
  ASSERT_EQ(run("fit --algorithm hydra --preset syn1 --seed 3 --out " + (dir / "fit").string()), 0);
  ASSERT_EQ(run("score --assignment " + (dir / "fit" / "assignment.csv").string() + " --preset syn1 --seed 3 --out " +
                (dir / "score").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "score" / "score.json"));
  // a truncated assignment is a data error
  std::ofstream(dir / "short.csv") << "participant_id,label\nP0001,1\n";
  EXPECT_EQ(run("score --assignment " + (dir / "short.csv").string() + " --preset syn1 --seed 3 --out " + (dir / "s2").string()), 2);
}
