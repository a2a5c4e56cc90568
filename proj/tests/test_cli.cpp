#include "reachdec/commands.hpp"
#include "reachdec/emit.hpp"
#include "reachdec/error.hpp"
#include "reachdec/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace reachdec;
namespace fs = std::filesystem;

namespace {

class Workspace : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("reachdec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write("zero2.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 0\n");
    write("zero4.mtx", "%%MatrixMarket matrix coordinate real general\n4 4 0\n");
    write("decay1.mtx", "%%MatrixMarket matrix array real general\n1 1\n-1\n");
    write("blockdiag.mtx",
          "%%MatrixMarket matrix coordinate real general\n4 4 6\n1 1 -0.1\n1 2 1\n2 1 -1\n2 2 -0.1\n3 3 -0.5\n"
          "4 4 -0.2\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }

  std::string scenario(const std::string& json) {
    write("s.json", json);
    return (dir_ / "s.json").string();
  }

  int run(const std::string& command, const std::string& json, std::string* out_text = nullptr,
          std::string* err_text = nullptr, OutputFormat format = OutputFormat::Csv) {
    CommandOptions o;
    o.scenario = scenario(json);
    o.out_dir = (dir_ / "out").string();
    o.format = format;
    std::ostringstream out, err;
    const int code = run_command(command, o, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
  }

  std::string read(const std::string& rel) {
    std::ifstream f(dir_ / rel);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

const char* kRest =
    R"({"A": "zero2.mtx", "X0": {"box": {"low": [-1, -1], "high": [1, 1]}}, "delta": 0.1, "N": 10,
        "model": "discrete", "property": "x1 < 2"})";

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(Workspace, MinimalScenarioDefaultsInputToZero) {
  const Scenario s = parse_scenario_file(scenario(
      R"({"A": "zero2.mtx", "X0": {"box": {"low": [0, 0], "high": [1, 1]}}, "delta": 0.1, "N": 10,
          "model": "discrete"})"));
  EXPECT_EQ(s.steps, 10);
  EXPECT_EQ(s.model, TimeModel::DiscreteTime);
  EXPECT_TRUE(s.system.u.is_constant());
  EXPECT_EQ(support_function(s.system.u.at(0), Vector2(1, 1)), 0.0);
  EXPECT_EQ(s.tracked, (std::vector<int>{0}));
}

TEST_F(Workspace, TrackedBlocksFromProperty) {
  const Scenario s = parse_scenario_file(scenario(
      R"({"A": "zero4.mtx", "X0": {"intervals": [[0,1],[0,1],[0,1],[0,1]]}, "delta": 0.1, "N": 3,
          "model": "dense", "property": "x3 < 0.5"})"));
  EXPECT_EQ(s.tracked, (std::vector<int>{1}));
  const Scenario v = parse_scenario_file(scenario(
      R"({"A": "zero4.mtx", "X0": {"point": [0,0,0,0]}, "delta": 0.1, "N": 3, "model": "dense",
          "variables": [4, 1]})"));
  EXPECT_EQ(v.tracked, (std::vector<int>{0, 1}));
}

TEST_F(Workspace, DimensionMismatchNamesBothDimensions) {
  try {
    parse_scenario_file(scenario(
        R"({"A": "zero4.mtx", "X0": {"point": [0,0,0]}, "delta": 0.1, "N": 3, "model": "dense"})"));
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_EQ(e.module(), "cli");
    EXPECT_NE(msg.find("4x4"), std::string::npos) << msg;
    EXPECT_NE(msg.find("dimension 3"), std::string::npos) << msg;
  }
}

TEST_F(Workspace, SchemaErrorsCarryFieldPaths) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {R"({"A": "zero2.mtx", "X0": {"box": {"low": [0, 0], "hgh": [1, 1]}}, "delta": 0.1, "N": 3,
           "model": "dense"})",
       "$.X0.box.hgh"},
      {R"({"A": "zero2.mtx", "X0": {"point": [0, 0]}, "delta": -1, "N": 3, "model": "dense"})", "$.delta"},
      {R"({"A": "zero2.mtx", "X0": {"point": [0, 0]}, "delta": 0.1, "N": 3, "model": "hybrid"})", "$.model"},
      {R"({"A": "zero2.mtx", "X0": {"point": [0, "a"]}, "delta": 0.1, "N": 3, "model": "dense"})", "$.X0.point[1]"},
      {R"({"A": "zero2.mtx", "X0": {"point": [0, 0]}, "delta": 0.1, "model": "dense"})", "$.N"},
      {R"({"A": "missing.mtx", "X0": {"point": [0, 0]}, "delta": 0.1, "N": 3, "model": "dense"})", "$.A"},
      {R"({"A": "zero2.mtx", "X0": {"point": [0, 0]}, "delta": 0.1, "N": 3, "model": "dense",
           "exponential": "lazy"})",
       "$.exponential"},
      {R"({"A": "zero2.mtx", "X0": {"point": [0, 0]}, "delta": 0.1, "N": 3, "model": "dense",
           "U": {"sequence": [{"point": [0, 0]}]}})",
       "$.U.sequence"},
      {R"({"A": "zero2.mtx", "X0": {"point": [0, 0]}, "delta": 0.1, "N": 3, "model": "dense",
           "blocks": [2]})",
       "$.blocks[0]"},
      {R"({"A": "zero2.mtx", "X0": {"point": [0, 0]}, "delta": 0.1, "N": 3, "model": "dense",
           "property": "x3 < 1"})",
       "$.property"},
  };
  for (const auto& [json, path] : cases) {
    try {
      parse_scenario_file(scenario(json));
      ADD_FAILURE() << json;
    } catch (const Error& e) {
      EXPECT_EQ(e.module(), "cli") << e.what();
      EXPECT_NE(std::string(e.what()).find(path), std::string::npos) << e.what();
    }
  }
}

TEST_F(Workspace, SetFormsAndSequenceFile) {
  write("u.json", R"([{"box": {"center": [0], "radius": [1]}}, {"intervals": [[0, 2]]}, {"point": [3]}])");
  const Scenario s = parse_scenario_file(scenario(
      R"({"A": "decay1.mtx", "X0": {"ball": {"center": [0], "radius": 1, "p": "inf"}},
          "U": {"sequence_file": "u.json"}, "delta": 0.1, "N": 3, "model": "discrete", "scheme": "eps:0.1",
          "seed": 5})"));
  EXPECT_FALSE(s.system.u.is_constant());
  EXPECT_EQ(s.system.u.length(), 3u);
  EXPECT_EQ(s.scheme.kind, ApproxScheme::Kind::EpsilonClose);
  EXPECT_EQ(s.seed, 5u);
  const Scenario poly = parse_scenario_file(scenario(
      R"({"A": "zero2.mtx", "X0": {"polygon": [{"a": [1, 0], "b": 1}, {"a": [0, 1], "b": 1},
          {"a": [-1, -1], "b": 1}]}, "delta": 0.1, "N": 1, "model": "discrete"})"));
  EXPECT_DOUBLE_EQ(support_function(poly.system.x0, Vector2(1, 0)), 1.0);
}

TEST_F(Workspace, CheckRestSystemVerified) {
  std::string out;
  EXPECT_EQ(run("check", kRest, &out), 0);
  EXPECT_EQ(out, "verified N=10\n");
}

TEST_F(Workspace, CheckViolationExitsOne) {
  std::string out;
  EXPECT_EQ(run("check",
                R"({"A": "decay1.mtx", "X0": {"intervals": [[1, 1.1]]}, "delta": 0.1, "N": 10,
                    "model": "discrete", "property": "x1 < 0.95"})",
                &out),
            1);
  EXPECT_EQ(out.rfind("violated k=", 0), 0u) << out;
  EXPECT_NE(out.find("x1 < 0.95"), std::string::npos);
}

TEST_F(Workspace, CheckWithoutPropertyIsInputError) {
  std::string err;
  const char* json = R"({"A": "zero2.mtx", "X0": {"point": [0, 0]}, "delta": 0.1, "N": 3, "model": "dense"})";
  EXPECT_EQ(run("check", json, nullptr, &err), 2);
  EXPECT_EQ(err.rfind("error:cli:schema:", 0), 0u) << err;
}

TEST_F(Workspace, ReachRowCountMatchesTrackedBlocks) {
  std::string out;
  const char* json =
      R"({"A": "blockdiag.mtx", "X0": {"box": {"center": [1, 0, 1, 1], "radius": [0.1, 0.1, 0.1, 0.1]}},
          "U": {"box": {"center": [0, 0, 0, 0], "radius": [0.01, 0.01, 0.01, 0.01]}},
          "delta": 0.05, "N": 7, "model": "dense"})";
  EXPECT_EQ(run("reach", json, &out, nullptr, OutputFormat::Both), 0) << out;
  const std::string csv = read("out/tube.csv");
  EXPECT_EQ(count_lines(csv), 1u + 7u * 2u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kTubeCsvHeader);
  EXPECT_TRUE(fs::exists(dir_ / "out/block_1.svg"));
  EXPECT_TRUE(fs::exists(dir_ / "out/block_2.svg"));
  EXPECT_FALSE(fs::exists(dir_ / "out/tube.poly"));
}

TEST_F(Workspace, EpsSchemeWritesPolygonSidecar) {
  const char* json =
      R"({"A": "blockdiag.mtx", "X0": {"ball": {"center": [1, 0, 1, 1], "radius": 0.1}},
          "delta": 0.05, "N": 3, "model": "discrete", "blocks": [1], "scheme": "eps:0.001"})";
  EXPECT_EQ(run("reach", json), 0);
  const std::string poly = read("out/tube.poly");
  EXPECT_EQ(poly.substr(0, poly.find('\n')), "block,k,a1,a2,b");
  EXPECT_GT(count_lines(poly), 3u * 8u);
}

TEST_F(Workspace, RestTubeRowsIdentical) {
  EXPECT_EQ(run("reach", R"({"A": "zero2.mtx", "X0": {"box": {"low": [-1, 0], "high": [1, 2]}}, "delta": 0.1,
                             "N": 3, "model": "discrete"})"),
            0);
  std::ifstream f(dir_ / "out/tube.csv");
  const auto rows = read_tube_csv(f);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.lo1, -1.0);
    EXPECT_EQ(r.hi1, 1.0);
    EXPECT_EQ(r.lo2, 0.0);
    EXPECT_EQ(r.hi2, 2.0);
  }
}

TEST_F(Workspace, DenseScalarDecay) {
  EXPECT_EQ(run("reach", R"({"A": "decay1.mtx", "X0": {"intervals": [[1, 2]]}, "delta": 0.1, "N": 20,
                             "model": "dense"})"),
            0);
  std::ifstream f(dir_ / "out/tube.csv");
  const auto rows = read_tube_csv(f);
  ASSERT_EQ(rows.size(), 20u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_NEAR(rows[i].t_hi - rows[i].t_lo, 0.1, 1e-12);
    EXPECT_TRUE(std::isnan(rows[i].lo2));
    if (i >= 2) EXPECT_LE(rows[i].hi1, rows[i - 1].hi1);
  }
}

TEST_F(Workspace, CsvRoundTripIsBitwise) {
  EXPECT_EQ(run("reach", R"({"A": "blockdiag.mtx", "X0": {"ball": {"center": [1, 0, 1, 1], "radius": 0.3}},
                             "delta": 0.0123, "N": 25, "model": "dense"})"),
            0);
  const Scenario s = parse_scenario_file((dir_ / "s.json").string());
  const DiscreteSystem sys = discretize(s);
  const ReachTube tube = reach(sys, s.steps, BlockStructure(4), s.tracked);
  const auto expected = tube_rows(tube);
  std::ifstream f(dir_ / "out/tube.csv");
  const auto rows = read_tube_csv(f);
  ASSERT_EQ(rows.size(), expected.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].k, expected[i].k);
    EXPECT_EQ(rows[i].block, expected[i].block);
    EXPECT_EQ(rows[i].t_lo, expected[i].t_lo);
    EXPECT_EQ(rows[i].lo1, expected[i].lo1);
    EXPECT_EQ(rows[i].hi1, expected[i].hi1);
    EXPECT_EQ(rows[i].lo2, expected[i].lo2);
    EXPECT_EQ(rows[i].hi2, expected[i].hi2);
  }
}

TEST_F(Workspace, CompareBlockDiagonalGapIsZero) {
  std::string out;
  const char* json =
      R"({"A": "blockdiag.mtx", "X0": {"box": {"center": [1, 0, 1, 1], "radius": [0.1, 0.2, 0.1, 0.1]}},
          "delta": 0.1, "N": 15, "model": "discrete", "seed": 3})";
  ASSERT_EQ(run("compare", json, &out), 0) << out;
  const auto pos = out.find("max_decomposition_gap=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LE(std::stod(out.substr(pos + 22)), 1e-9) << out;
  EXPECT_EQ(count_lines(read("out/compare.csv")), 16u);
}

TEST_F(Workspace, BoundsAndDiscretizeWriteFiles) {
  std::string out;
  const char* json =
      R"({"A": "blockdiag.mtx", "X0": {"box": {"center": [1, 0, 1, 1], "radius": [0.1, 0.2, 0.1, 0.1]}},
          "U": {"intervals": [[0, 0.1], [0, 0.1], [-0.1, 0], [0, 0]]}, "delta": 0.1, "N": 12, "model": "discrete"})";
  ASSERT_EQ(run("bounds", json, &out), 0) << out;
  EXPECT_NE(out.find("bounds_hold=yes"), std::string::npos) << out;
  EXPECT_EQ(count_lines(read("out/bounds.csv")), 13u);
  ASSERT_EQ(run("discretize", json, &out), 0) << out;
  EXPECT_TRUE(fs::exists(dir_ / "out/phi.mtx"));
  EXPECT_EQ(count_lines(read("out/x_init_bounds.csv")), 5u);
  EXPECT_EQ(count_lines(read("out/v_bounds.csv")), 5u);
}

TEST_F(Workspace, ErrorLineFormatAndCodes) {
  std::string err;
  EXPECT_EQ(run("reach", R"({"A": "zero2.mtx"})", nullptr, &err), 2);
  EXPECT_EQ(err.rfind("error:cli:schema: $.X0", 0), 0u) << err;
  EXPECT_EQ(count_lines(err), 1u);
  EXPECT_EQ(run("frobnicate", kRest, nullptr, &err), 2);
  EXPECT_EQ(err.rfind("error:cli:usage:", 0), 0u);
  write("big.mtx", "%%MatrixMarket matrix array real general\n1 1\n1e300\n");
  EXPECT_EQ(run("reach", R"({"A": "big.mtx", "X0": {"point": [1]}, "delta": 1e10, "N": 3, "model": "discrete"})",
                nullptr, &err),
            3);
  EXPECT_EQ(err.rfind("error:linalg:nonfinite:", 0), 0u) << err;
}

#ifdef REACHDEC_CLI
TEST_F(Workspace, ExecutableExitCodes) {
  const std::string s = scenario(kRest);
  const std::string cli = REACHDEC_CLI;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status(cli + " check --scenario " + s), 0);
  EXPECT_EQ(status(cli + " check --scenario " + s + " --format pdf"), 2);
  EXPECT_EQ(status(cli + " check"), 2);
  EXPECT_EQ(status(cli + " reach --scenario " + s + " --scheme eps:0 --out " + (dir_ / "o").string()), 2);
  EXPECT_EQ(status(cli + " reach --scenario " + s + " --format both --out " + (dir_ / "o").string()), 0);
}
#endif
