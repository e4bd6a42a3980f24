#include "cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using rigidity::cli::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = rigidity::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args, int expected_code = 0) {
  args.push_back("--format");
  args.push_back("json");
  const auto r = run(args);
  EXPECT_EQ(r.code, expected_code) << r.err;
  return json::parse(r.out);
}

}  // namespace

TEST(Cli, GammaOfTypeOne) {
  const auto j = run_json({"gamma", "I(2,2)"});
  EXPECT_EQ(j["domain"], "I(2,2)");
  EXPECT_EQ(j["n"], 4);
  EXPECT_DOUBLE_EQ(j["gamma"].get<double>(), 4.0);
  EXPECT_EQ(j["vanishing_q_max"], 2);
  EXPECT_FALSE(j["all_groups_vanish"].get<bool>());
  EXPECT_TRUE(j.contains("scalar_curvature"));
}

TEST(Cli, GammaOfProduct) {
  const auto j = run_json({"gamma", "I(1,1)xIII(2)"});
  EXPECT_EQ(j["n"], 4);
  EXPECT_DOUBLE_EQ(j["gamma"].get<double>(), 2.0);
  EXPECT_FALSE(j.contains("scalar_curvature"));
  EXPECT_EQ(j["factors"].size(), 2u);
}

TEST(Cli, TableDefaultsToMarkdown) {
  const auto r = run({"table", "--max", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("| type | params | n | gamma |", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("| I | 1,1 | 1 | 2.0 | 2 | computed | true |"), std::string::npos) << r.out;
}

TEST(Cli, TableCsvAndJson) {
  const auto csv = run({"table", "--max", "3", "--format", "csv"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("type,params,n,gamma,gamma_reference,source,match\n", 0), 0u) << csv.out;
  const auto j = run_json({"table", "--max", "4"});
  EXPECT_TRUE(j["passed"].get<bool>());
  bool saw_v = false;
  for (const auto& row : j["rows"]) {
    EXPECT_TRUE(row["match"].get<bool>());
    if (row["type"] == "V") {
      saw_v = true;
      EXPECT_EQ(row["source"], "reference");
      EXPECT_DOUBLE_EQ(row["gamma"].get<double>(), 12.0);
    }
  }
  EXPECT_TRUE(saw_v);
}

TEST(Cli, VerifyCvOnDisk) {
  const auto j = run_json({"verify", "cv", "--domain", "I(1,1)", "--q", "0", "--samples", "10"});
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["sign_verdicts"]["negative-definite"], 10);
  EXPECT_LT(j["max_identity_residual"].get<double>(), 1e-8);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"gamma"}).code, 2);
  EXPECT_EQ(run({"gamma", "I(2)"}).code, 2);
  EXPECT_EQ(run({"gamma", "IV(2)"}).code, 2);
  EXPECT_EQ(run({"gamma", "I(2,2)", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"verify", "cv", "--domain", "I(2,2)", "--q", "9"}).code, 2);
  EXPECT_EQ(run({"verify", "cv", "--domain", "V", "--q", "1"}).code, 2);
  EXPECT_EQ(run({"verify", "growth", "--case", "nope"}).code, 2);
  EXPECT_EQ(run({"verify", "ke", "--case", "flat", "--dim", "7"}).code, 2);
  EXPECT_EQ(run({"lab", "decompose", "--basis", "5"}).code, 2);
  EXPECT_EQ(run({"verify", "growth", "--custom", "z^^2"}).code, 2);
}

TEST(Cli, HelpExitsCleanly) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verify"), std::string::npos);
}

TEST(Cli, GrowthCases) {
  const auto pole = run_json({"verify", "growth", "--case", "dz-over-z"});
  EXPECT_EQ(pole["verdict"], "not-poincare-growth");
  const auto custom = run_json({"verify", "growth", "--custom", "z^-1*L^-1", "--expect", "poincare-growth"});
  EXPECT_EQ(custom["verdict"], "poincare-growth");
  EXPECT_TRUE(custom["passed"].get<bool>());
}

TEST(Cli, FailedExpectationExitsOne) {
  const auto j = run_json({"verify", "growth", "--custom", "z^-1", "--expect", "poincare-growth"}, 1);
  EXPECT_FALSE(j["passed"].get<bool>());
  EXPECT_EQ(j["expected"], "poincare-growth");
  EXPECT_EQ(j["verdict"], "not-poincare-growth");
}

TEST(Cli, GoodMetricAndKe) {
  const auto good = run_json({"verify", "good-metric", "--case", "log-power:2"});
  EXPECT_TRUE(good["good"].get<bool>());
  const auto dual = run_json({"verify", "good-metric", "--case", "log-power:2", "--dual"});
  EXPECT_TRUE(dual["good"].get<bool>());
  const auto bad = run_json({"verify", "good-metric", "--case", "abs-z-squared"});
  EXPECT_FALSE(bad["good"].get<bool>());
  EXPECT_TRUE(bad["passed"].get<bool>());
  const auto ke = run_json({"verify", "ke", "--case", "poincare-disk"});
  EXPECT_NEAR(ke["fitted_k"].get<double>(), 2.0, 1e-4);
  const auto flat = run_json({"verify", "ke", "--case", "flat"});
  EXPECT_FALSE(flat["kahler_einstein"].get<bool>());
  EXPECT_TRUE(flat["passed"].get<bool>());
}

TEST(Cli, LabDecompose) {
  const auto j = run_json({"lab", "decompose", "--basis", "16", "--epsilon", "0.01"});
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["harmonic_dim"], json::array({8, 16, 8}));
  EXPECT_EQ(j["dimensions"], json::array({16, 32, 16}));
  EXPECT_LT(j["adjoint_residual"].get<double>(), 1e-10);
}

TEST(Cli, Deterministic) {
  const std::vector<std::string> args{"verify", "cv", "--domain", "III(2)", "--q", "1", "--samples", "20"};
  EXPECT_EQ(run(args).out, run(args).out);
  const auto a = run_json({"lab", "decompose", "--basis", "8", "--seed", "3"});
  const auto b = run_json({"lab", "decompose", "--basis", "8", "--seed", "3"});
  EXPECT_EQ(a, b);
}

TEST(Cli, SeedFromEnvironment) {
  ::setenv("RIGIDITY_GAUGE_SEED", "7", 1);
  const auto env = run_json({"verify", "cv", "--domain", "I(2,2)", "--q", "1", "--samples", "5"});
  const auto flag = run_json({"verify", "cv", "--domain", "I(2,2)", "--q", "1", "--samples", "5", "--seed", "9"});
  ::setenv("RIGIDITY_GAUGE_SEED", "bogus", 1);
  const auto bad = run({"verify", "cv", "--domain", "I(2,2)", "--q", "1", "--samples", "5"});
  ::unsetenv("RIGIDITY_GAUGE_SEED");
  EXPECT_EQ(env["seed"], 7);
  EXPECT_EQ(flag["seed"], 9);
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(run_json({"verify", "cv", "--domain", "I(2,2)", "--q", "1", "--samples", "5"})["seed"], 42);
}

TEST(Cli, OutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "rigidity_gauge_cli_test.json";
  const auto r = run({"gamma", "IV(5)", "-o", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const auto j = json::parse(in);
  EXPECT_DOUBLE_EQ(j["gamma"].get<double>(), 5.0);
  std::filesystem::remove(path);
  EXPECT_EQ(run({"gamma", "IV(5)", "-o", "/nonexistent/dir/x.json"}).code, 2);
}

TEST(Cli, VerifyAll) {
  const auto j = run_json({"verify", "all"});
  EXPECT_EQ(j["rows"].size(), 8u);
  EXPECT_TRUE(j["passed"].get<bool>());
}
