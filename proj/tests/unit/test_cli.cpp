#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using bsf::cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bsf");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("bsf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path write(const std::string& name, const std::string& content) {
    std::ofstream(dir_ / name) << content;
    return dir_ / name;
  }
  fs::path dir_;
};

const std::string kConfigs = BSF_CONFIG_DIR;

}  // namespace

TEST_F(CliTest, ExactToyPair) {
  const auto r = run({"exact", "--config", kConfigs + "/toy_pair.json", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir_ / "posterior.csv");
  std::istringstream lines(csv);
  std::string header, together, split;
  std::getline(lines, header);
  std::getline(lines, together);
  std::getline(lines, split);
  EXPECT_EQ(header, "partition_rgs,K,log_weight,probability");
  EXPECT_EQ(together.substr(0, 8), "\"0,0\",1,");
  EXPECT_NEAR(std::stod(together.substr(together.rfind(',') + 1)), 0.9, 1e-12);
  EXPECT_NEAR(std::stod(split.substr(split.rfind(',') + 1)), 0.1, 1e-12);
  EXPECT_EQ(slurp(dir_ / "map.txt"), "0,0\n");
}

TEST_F(CliTest, MaxKOneGivesSingleRow) {
  const auto r = run({"exact", "--config", kConfigs + "/toy_pair.json", "--out", dir_.string(), "--max-k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "posterior.csv"), "partition_rgs,K,log_weight,probability\n\"0,0\",1,-4.34195446318562,1\n");
}

TEST_F(CliTest, MissingDataFileIsIngestionError) {
  const auto cfg = write("c.json", R"({"data": {"path": "nope.csv"}})");
  const auto r = run({"exact", "--config", cfg.string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, MalformedJsonIsConfigError) {
  const auto cfg = write("c.json", R"({"data": {"path": "x.csv"},})");
  EXPECT_EQ(run({"mcmc", "--config", cfg.string()}).code, 2);
  const auto comment = write("d.json", "// comment\n{}");
  EXPECT_EQ(run({"exact", "--config", comment.string()}).code, 2);
}

TEST_F(CliTest, UnknownKeyIsConfigError) {
  write("p.csv", "0\n1\n");
  const auto cfg = write("c.json", R"({"data": {"path": "p.csv"}, "modle": {}})");
  const auto r = run({"exact", "--config", cfg.string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("modle"), std::string::npos);
}

TEST_F(CliTest, OverCapIsExitFour) {
  std::string rows;
  for (int i = 0; i < 13; ++i) rows += std::to_string(i) + "\n";
  write("big.csv", rows);
  const auto cfg = write("c.json", R"({"data": {"path": "big.csv"}, "model": {"enum_cap": 12}})");
  EXPECT_EQ(run({"exact", "--config", cfg.string(), "--out", dir_.string()}).code, 4);
}

TEST_F(CliTest, ZeroReplicatesIsConfigError) {
  const auto cfg = write("c.json", R"({"oracle": {"means": [[0.0]]}, "schedule": {"kind": "miller"},
    "n_grid": [4], "replicates": 0})");
  EXPECT_EQ(run({"experiment", "--config", cfg.string(), "--out", dir_.string()}).code, 2);
}

TEST_F(CliTest, UnknownSubcommandAndMissingFlag) {
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"exact"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, McmcWritesSummaries) {
  const auto r = run({"mcmc", "--config", kConfigs + "/toy_pair.json", "--out", dir_.string(), "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("acceptance"), std::string::npos);
  EXPECT_EQ(slurp(dir_ / "k_histogram.csv").substr(0, 16), "K,count,frequenc");
  EXPECT_EQ(slurp(dir_ / "coclustering.csv").substr(0, 6), "p0,p1\n");
  const auto again_dir = dir_ / "again";
  run({"mcmc", "--config", kConfigs + "/toy_pair.json", "--out", again_dir.string(), "--seed", "3"});
  EXPECT_EQ(slurp(dir_ / "samples.csv"), slurp(again_dir / "samples.csv"));
}

TEST_F(CliTest, ExperimentIsDeterministicAcrossWorkers) {
  const auto cfg = write("c.json", R"({"oracle": {"means": [[-3.0, 0.0], [3.0, 0.0]]},
    "schedule": {"kind": "corollary"}, "n_grid": [4, 6], "replicates": 4, "seed": 9})");
  const auto a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run({"experiment", "--config", cfg.string(), "--out", a.string(), "--workers", "1"}).code, 0);
  ASSERT_EQ(run({"experiment", "--config", cfg.string(), "--out", b.string(), "--workers", "3"}).code, 0);
  EXPECT_EQ(slurp(a / "consistency_rows.csv"), slurp(b / "consistency_rows.csv"));
  EXPECT_EQ(slurp(a / "consistency_aggregate.csv"), slurp(b / "consistency_aggregate.csv"));
}

TEST_F(CliTest, GenDataRoundTripsIntoExact) {
  ASSERT_EQ(run({"gen-data", "--config", kConfigs + "/gen_pair.json", "--out", dir_.string()}).code, 0);
  const std::string truth = slurp(dir_ / "truth.txt");
  const auto cfg = write("c.json", R"({"data": {"path": "data.csv"}, "model": {"log_lambda": -8.0},
    "truth": ")" + truth.substr(0, truth.size() - 1) + R"("})");
  const auto r = run({"exact", "--config", cfg.string(), "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("truth probability"), std::string::npos);
}

TEST_F(CliTest, VerifyPrintsTable) {
  const auto cfg = write("v.json", R"({"trials": 20})");
  const auto r = run({"verify", "--config", cfg.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("forest_factorization"), std::string::npos);
}
