#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "linksynth/factorization.hpp"
#include "linksynth/io.hpp"
#include "linksynth/kinematics.hpp"
#include "linksynth/motioncurve.hpp"

namespace linksynth {
namespace {

namespace fs = std::filesystem;

const std::string kData = LINKSYNTH_DATA_DIR;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::path(::testing::TempDir()) / "linksynth_cli" / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  int run(const std::string& args) const {
    const std::string cmd = std::string(LINKSYNTH_CLI) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string out(const std::string& sub) const { return (dir_ / sub).string(); }

  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream is(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TEST_F(CliTest, FactorPublishedShape) {
  ASSERT_EQ(run("factor --shape " + kData + "/table2_shape.json --out " + out("f")), 0);
  const auto quads = io::read_json(out("f/quadratic_factors.json"))["factors"];
  ASSERT_EQ(quads.size(), 3u);
  EXPECT_NEAR(quads[0]["b"].get<double>(), -12.165, 0.05);
  EXPECT_NEAR(quads[0]["c"].get<double>(), 37.143, 0.05);

  const FactorizedCurve curve =
      io::curve_from_json(io::read_json(kData + "/table2_shape.json"));
  const DQPolynomial p = expand(curve);
  const auto chains = io::read_json(out("f/chains.json"))["chains"];
  ASSERT_EQ(chains.size(), 6u);
  for (const auto& doc : chains) {
    const OpenChain c = io::chain_from_json(doc);
    EXPECT_EQ(c.joints.size(), 3u);
    EXPECT_LE(verify_chain(c, p), 1e-8);
    EXPECT_EQ(doc["axes"].size(), 3u);
  }
  const auto linkages = io::read_json(out("f/linkages.json"))["linkages"];
  EXPECT_GE(linkages.size(), 4u);
  for (const auto& lk : linkages) {
    EXPECT_LE(lk["closure_residual"].get<double>(), 1e-8);
    EXPECT_EQ(lk["joints"].size(), 6u);
  }
  EXPECT_TRUE(fs::exists(out("f/manifest.json")));
}

TEST_F(CliTest, FactorSingleJointGivesNoLinkage) {
  std::ofstream(out("one.json"))
      << R"({"factors": [{"h0": 1, "d": [0, 0, 1], "p": [1, 2, 3]}]})";
  ASSERT_EQ(run("factor --shape " + out("one.json") + " --out " + out("f")), 0);
  EXPECT_EQ(io::read_json(out("f/chains.json"))["chains"].size(), 1u);
  EXPECT_EQ(io::read_json(out("f/linkages.json"))["linkages"].size(), 0u);
}

TEST_F(CliTest, FactorNonGenericExitsThree) {
  std::ofstream(out("ng.json")) << R"({"factors": [
    {"h0": 1, "d": [0, 0, 1], "p": [0, 0, 0]},
    {"h0": 1, "d": [0, 1, 0], "p": [1, 0, 0]},
    {"h0": 2, "d": [1, 0, 0], "p": [0, 2, 0]}]})";
  EXPECT_EQ(run("factor --shape " + out("ng.json") + " --out " + out("f")), 3);
}

TEST_F(CliTest, TrajectoryRowsMatchCurve) {
  ASSERT_EQ(run("trajectory --shape " + kData +
                "/table2_shape.json --samples 100 --t-range -3 4 --out " +
                out("tr")),
            0);
  const auto rows = read_csv(out("tr/trajectory.csv"));
  ASSERT_EQ(rows.size(), 101u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "x", "y", "z", "qw", "qx",
                                               "qy", "qz"}));
  const FactorizedCurve curve =
      io::curve_from_json(io::read_json(kData + "/table2_shape.json"));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double t = std::stod(rows[i][0]);
    const Pose pose = dq_to_pose(curve_eval(curve, t));
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(std::stod(rows[i][1 + k]), pose.translation()[k],
                  1e-12 * std::max(1.0, pose.translation().norm()));
    }
  }
  EXPECT_DOUBLE_EQ(std::stod(rows[1][0]), -3.0);
  EXPECT_DOUBLE_EQ(std::stod(rows[100][0]), 4.0);
}

TEST_F(CliTest, TrajectoryRejectsEmptyCurve) {
  std::ofstream(out("empty.json")) << R"({"factors": []})";
  EXPECT_EQ(run("trajectory --shape " + out("empty.json") + " --out " + out("tr")), 1);
}

TEST_F(CliTest, EvolvePublishedTargetsIsDeterministic) {
  const std::string args = "evolve --poses " + kData + "/table1_poses.json --config " +
                           kData + "/default_config.json --seed 2 --out ";
  ASSERT_EQ(run(args + out("a")), 0);
  ASSERT_EQ(run(args + out("b")), 0);
  for (const char* name : {"shape_parameters.json", "trace.csv", "errors.csv"}) {
    EXPECT_EQ(slurp(out("a/") + name), slurp(out("b/") + name)) << name;
  }
  const auto errors = read_csv(out("a/errors.csv"));
  ASSERT_EQ(errors.size(), 11u);
  EXPECT_EQ(errors[0][0], "label");
  EXPECT_EQ(errors[1][0], "TP1");
  const FactorizedCurve shape =
      io::curve_from_json(io::read_json(out("a/shape_parameters.json")));
  EXPECT_EQ(shape.degree(), 3);
  const auto manifest = io::read_json(out("a/manifest.json"));
  EXPECT_EQ(manifest["seed"].get<int>(), 2);
  EXPECT_EQ(manifest["result"]["stop_reason"], "converged");
}

TEST_F(CliTest, EvolveReportsNonConvergence) {
  std::ofstream(out("cfg.json")) << R"({"max_iters": 3})";
  EXPECT_EQ(run("evolve --poses " + kData + "/table1_poses.json --config " +
                out("cfg.json") + " --seed 2 --out " + out("e")),
            2);
  EXPECT_EQ(read_csv(out("e/trace.csv")).size(), 4u);
}

TEST_F(CliTest, InputErrorsExitOne) {
  std::ofstream(out("empty.json")) << "[]";
  const std::string cfg = " --config " + kData + "/default_config.json";
  EXPECT_EQ(run("evolve --poses " + out("empty.json") + cfg + " --out " + out("e")), 1);
  EXPECT_EQ(run("evolve --poses " + out("missing.json") + cfg + " --out " + out("e")), 1);
  EXPECT_EQ(run("synthesize --poses " + kData + "/table1_poses.json --out " + out("s")),
            1);
  EXPECT_EQ(run("evolve --poses " + kData + "/table1_poses.json" + cfg +
                " --lambda-rule fast --out " + out("e")),
            1);
  EXPECT_EQ(run(""), 1);
}

TEST_F(CliTest, SynthesizeKeepsBestSeed) {
  ASSERT_EQ(run("synthesize --poses " + kData + "/table1_poses.json --config " +
                kData + "/default_config.json --seed 2 --seeds 2 --out " + out("s")),
            0);
  const auto manifest = io::read_json(out("s/manifest.json"));
  ASSERT_EQ(manifest["runs"].size(), 2u);
  double best = 1e300;
  for (const auto& r : manifest["runs"]) {
    if (r["stop_reason"] == "converged") {
      best = std::min(best, r["objective"].get<double>());
    }
  }
  const int seed = manifest["seed"].get<int>();
  for (const auto& r : manifest["runs"]) {
    if (r["seed"].get<int>() == seed) {
      EXPECT_EQ(r["objective"].get<double>(), best);
    }
  }
  EXPECT_TRUE(fs::exists(out("s/seed_2/trace.csv")));
  EXPECT_TRUE(fs::exists(out("s/seed_3/trace.csv")));
  EXPECT_EQ(slurp(out("s/shape_parameters.json")),
            slurp(out("s/seed_" + std::to_string(seed) + "/shape_parameters.json")));
  EXPECT_GE(io::read_json(out("s/linkages.json"))["linkages"].size(), 1u);
}

}  // namespace
}  // namespace linksynth
