#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "json.hpp"
#include "mhdpinn/csv_io.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("mhdpinn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  CliRun run(const std::string& args) const {
    const fs::path err = root_ / "stderr.txt";
    const std::string cmd = "cd '" + root_.string() + "' && '" MHDPINN_CLI "' " + args + " > /dev/null 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    std::ifstream is(err);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, std::string(std::istreambuf_iterator<char>(is), {})};
  }

  std::string slurp(const fs::path& p) const {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
  }

  void write(const fs::path& p, const std::string& text) const { std::ofstream(p) << text; }

  fs::path root_;
};

constexpr const char* kSmallNet = R"({"preset": "alfven-desk", "hidden_layers": 2, "hidden_width": 8, "eval_dims": [16, 16, 5]})";

}  // namespace

TEST_F(Cli, GenWritesCubeOfExpectedSize) {
  ASSERT_EQ(run("gen --preset alfven-desk --seed 3 --out d1").code, 0);
  const fs::path cube = root_ / "d1" / "cube.mhdc";
  ASSERT_TRUE(fs::exists(cube));
  const std::string name = "alfven";
  EXPECT_GE(fs::file_size(cube), 64u * 64 * 11 * 8 * 8);
  EXPECT_LT(fs::file_size(cube), 64u * 64 * 11 * 8 * 8 + 256);
  ASSERT_EQ(run("gen --preset alfven-desk --seed 3 --out d2").code, 0);
  EXPECT_EQ(slurp(cube), slurp(root_ / "d2" / "cube.mhdc"));
  EXPECT_EQ(slurp(root_ / "d1" / "trajectories.csv"), slurp(root_ / "d2" / "trajectories.csv"));
}

TEST_F(Cli, GenEchoesDatasetCoefficients) {
  write(root_ / "gem.json", R"({"preset": "alfven-desk", "dataset": "GEM", "eval_dims": [4, 4, 2]})");
  ASSERT_EQ(run("gen --config gem.json --out d").code, 0);
  std::ifstream is(root_ / "d" / "manifest.json");
  const auto m = nlohmann::json::parse(is);
  EXPECT_EQ(m["dataset"]["nu"].get<double>(), 1.24e-4);
  EXPECT_EQ(m["dataset"]["eta"].get<double>(), 1.88e-3);
}

TEST_F(Cli, BadConfigKeyExitsTwoWithKeyName) {
  write(root_ / "bad.json", R"({"preset": "alfven-desk", "learning_rat": 0.1})");
  const CliRun r = run("gen --config bad.json --out d");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("key=learning_rat"), std::string::npos) << r.err;
  EXPECT_EQ(run("train --preset alfven-desk --strategy spiral").code, 2);
}

TEST_F(Cli, MissingFilesExitThree) {
  EXPECT_EQ(run("train --config nowhere.json").code, 3);
  EXPECT_EQ(run("train --preset alfven-desk --data nodata").code, 3);
}

TEST_F(Cli, ChecksumMismatchExitsFour) {
  write(root_ / "small.json", kSmallNet);
  ASSERT_EQ(run("gen --config small.json --out d").code, 0);
  {
    std::ofstream os(root_ / "d" / "trajectories.csv", std::ios::app);
    os << "\n";
  }
  const CliRun r = run("train --config small.json --data d --epochs 1 --out run");
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("checksum_mismatch"), std::string::npos);
}

TEST_F(Cli, TrainOneEpochAndRerunFromManifest) {
  write(root_ / "small.json", kSmallNet);
  ASSERT_EQ(run("gen --config small.json --out d").code, 0);
  ASSERT_EQ(run("train --config small.json --data d --epochs 1 --out run1").code, 0);
  const auto h = mhdpinn::read_metrics(root_ / "run1" / "metrics.csv");
  EXPECT_EQ(h.size(), 1u);
  EXPECT_TRUE(fs::exists(root_ / "run1" / "checkpoint.bin"));
  EXPECT_TRUE(fs::exists(root_ / "run1" / "manifest.json"));

  ASSERT_EQ(run("train --config small.json --data d --epochs 30 --out run2").code, 0);
  ASSERT_EQ(run("train --config run2/config.json --data d --out run3").code, 0);
  const auto a = mhdpinn::read_metrics(root_ / "run2" / "metrics.csv");
  const auto b = mhdpinn::read_metrics(root_ / "run3" / "metrics.csv");
  ASSERT_EQ(a.size(), 30u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].l_pinn, b[i].l_pinn);
    EXPECT_EQ(a[i].full_grid_mse, b[i].full_grid_mse);
  }
  EXPECT_EQ(slurp(root_ / "run2" / "checkpoint.bin"), slurp(root_ / "run3" / "checkpoint.bin"));

  // eval recomputes the last logged full-grid MSE from the checkpoint
  const std::string out = (root_ / "eval.txt").string();
  const std::string cmd = "cd '" + root_.string() + "' && '" MHDPINN_CLI "' eval --config small.json --data d --checkpoint run2/checkpoint.bin > '" + out + "'";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_NEAR(std::stod(slurp(out)), *a.back().full_grid_mse, 1e-12 * *a.back().full_grid_mse);
}

TEST_F(Cli, StepsFlagMatchesPaperSchedule) {
  write(root_ / "tiny.json", R"({"preset": "alfven-desk", "hidden_layers": 1, "hidden_width": 4,
                                 "eval_dims": [4, 4, 2], "n_colloc": 8, "samples_per_line": 3, "eval_every": 5000})");
  ASSERT_EQ(run("train --config tiny.json --strategy cylinder --steps 15 --epochs 5000 --out run").code, 0);
  const auto h = mhdpinn::read_metrics(root_ / "run" / "metrics.csv");
  ASSERT_EQ(h.size(), 5000u);
  EXPECT_EQ(h[1499].curriculum_step, 14u);
  EXPECT_EQ(h[1500].curriculum_step, 15u);
  EXPECT_EQ(h[4999].curriculum_step, 15u);
}

TEST_F(Cli, CompareWritesRunDirectoriesAndTable) {
  write(root_ / "small.json", kSmallNet);
  setenv("MHDPINN_OUT_ROOT", (root_ / "outroot").c_str(), 1);
  const CliRun r = run("compare --config small.json --strategies random,cuboid,cylinder --seeds 2 --epochs 3 --jobs 2 --out cmp");
  unsetenv("MHDPINN_OUT_ROOT");
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path dir = root_ / "outroot" / "cmp";
  for (const char* s : {"random", "cuboid", "cylinder"})
    for (int k : {0, 1}) EXPECT_TRUE(fs::exists(dir / s / ("seed_" + std::to_string(k)) / "metrics.csv"));
  std::ifstream is(dir / "comparison.csv");
  std::string line;
  int rows = -1;
  std::string random_row;
  while (std::getline(is, line)) {
    if (line.rfind("random,", 0) == 0) random_row = line;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
  const auto cells = mhdpinn::split_csv_line(random_row);
  EXPECT_EQ(std::stod(cells[6]), 0.0);
  EXPECT_EQ(std::stod(cells[7]), 0.0);
  EXPECT_TRUE(fs::exists(dir / "summary.txt"));
}

TEST_F(Cli, CompareOneStrategyOneSeed) {
  write(root_ / "small.json", kSmallNet);
  ASSERT_EQ(run("compare --config small.json --strategies cylinder --seeds 1 --epochs 2 --out c").code, 0);
  std::ifstream is(root_ / "c" / "comparison.csv");
  std::string line;
  int n = 0;
  while (std::getline(is, line)) ++n;
  EXPECT_EQ(n, 2);
}
