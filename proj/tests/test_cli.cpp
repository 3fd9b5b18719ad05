#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "rankvar/io.hpp"
#include "support.hpp"

using rankvar::cli::cli_dispatch;
namespace fs = std::filesystem;
using rankvar::testkit::slurp;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = rankvar::testkit::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    write(dir / "items.csv", "item,value\nA,1\nA,2\nA,1.5\nB,3\nB,2.5\nC,0.2\nC,4\nC,1\n");
    write(dir / "bin.csv", "item,successes,trials\nA,9,12\nB,30,50\nC,2,10\n");
    std::string tc = "label,g1,g2,g3\n";
    for (int i = 0; i < 12; ++i)
      tc += std::to_string(i % 2) + "," + std::to_string(i * 0.3 + (i % 2) * 2) + "," +
            std::to_string((i * 7 % 5) * 0.1) + "," + std::to_string(i % 2 + i * 0.01) + "\n";
    write(dir / "tc.csv", tc);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

nlohmann::json parse(const std::string& text) { return nlohmann::json::parse(text); }

}  // namespace

TEST_F(Cli, RatesPolynomial) {
  const auto r = run({"rates", "--family", "polynomial", "--n", "10000", "--p", "10000", "--alpha", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(parse(r.out)["payload"]["nu_pol"].get<double>(), 39.81, 5e-3);
}

TEST_F(Cli, SimulateReportAndTables) {
  const auto r = run({"simulate", "--tail", "exponential", "--rate", "1", "--n", "500", "--p-rule",
                      "0.0005*n^2", "--noise-sd", "3.5", "--reps", "1000", "--j0", "1", "--j0",
                      "n^0.25", "--mode", "prefix", "--direction", "descending", "--seed", "7",
                      "--out", path("sim.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(slurp(dir / "sim.json"));
  EXPECT_EQ(j["payload"]["p"], 125);
  EXPECT_NEAR(j["payload"]["rows"][0]["probability"].get<double>(), 0.909, 0.03);
  EXPECT_EQ(j["config"]["seed"], 7);
  EXPECT_TRUE(fs::exists(dir / "sim.table.csv"));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"simulate", "--n", "10"}).code, 2);  // missing --seed
  EXPECT_EQ(run({"simulate", "--n", "10", "--p", "3", "--j0", "5", "--seed", "1"}).code, 2);
  EXPECT_EQ(run({"rates", "--family", "bogus", "--n", "1", "--p", "1", "--alpha", "1"}).code, 2);
  write(dir / "bad.csv", "item,value\nA,1\nA,abc\n");
  const auto bad = run({"bootstrap", "--input", path("bad.csv"), "--seed", "1"});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.err.find(":3"), std::string::npos) << bad.err;
  write(dir / "over.csv", "item,successes,trials\nA,13,12\n");
  EXPECT_EQ(run({"bootstrap", "--input", path("over.csv"), "--format", "binomial", "--seed", "1"}).code, 3);
  EXPECT_EQ(run({"bootstrap", "--input", path("items.csv"), "--m", "20000000", "--seed", "1"}).code, 4);
  EXPECT_EQ(run({"calibrate", "--tail", "bounded", "--alpha", "1", "--n", "50", "--p", "3", "--reps",
                 "50", "--target", "0.5", "--sd-low", "0", "--sd-high", "1e-6", "--seed", "1"})
                .code,
            4);
}

TEST_F(Cli, BootstrapEnumeration) {
  write(dir / "two.csv", "item,value\nA,0\nA,2\nB,1\nB,1\n");
  const auto r = run({"bootstrap", "--input", path("two.csv"), "--level", "0.9", "--exhaustive",
                      "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r.out);
  EXPECT_EQ(j["payload"]["intervals"][0]["lower"], 1);
  EXPECT_EQ(j["payload"]["intervals"][0]["upper"], 2);
}

TEST_F(Cli, EveryRandomizedCommandIsDeterministic) {
  const std::vector<std::vector<std::string>> commands{
      {"simulate", "--tail", "pareto", "--alpha", "4", "--n", "600", "--p-rule", "0.0005*n^2",
       "--noise-sd", "3.5", "--reps", "500", "--j0", "1", "--j0", "(1/5)*n^(4/9)", "--mode", "both",
       "--direction", "descending", "--seed", "3"},
      {"bootstrap", "--input", path("items.csv"), "--stat", "mean", "--B", "1000", "--level", "0.9",
       "--seed", "1"},
      {"bootstrap", "--input", path("bin.csv"), "--format", "binomial", "--B", "500", "--seed", "2"},
      {"bootstrap", "--input", path("tc.csv"), "--format", "twoclass", "--B", "500", "--seed", "2"},
      {"topset", "--input", path("tc.csv"), "--j", "1", "--j", "2", "--B", "400", "--nprime", "30",
       "--seed", "5"},
      {"calibrate", "--tail", "bounded", "--alpha", "1", "--n", "100", "--p-rule", "2*n^(1/4)",
       "--j0", "2*n^(1/4)", "--reps", "500", "--target", "0.5", "--tol", "0.03", "--seed", "8"},
      {"required-n", "--tail", "exponential", "--p", "10", "--noise-sd", "3.5", "--reps", "300",
       "--j0", "2", "--n", "100", "--target", "0.5", "--n-grid", "100,400,1600,6400,25600",
       "--direction", "descending", "--seed", "4"},
  };
  for (const auto& cmd : commands) {
    std::vector<std::string> outputs;
    for (const char* workers : {"1", "8", "1"}) {
      auto args = cmd;
      args.insert(args.end(), {"--out", path("r.json"), "--workers", workers});
      const auto r = run(args);
      ASSERT_EQ(r.code, 0) << cmd[0] << ": " << r.err;
      auto doc = parse(slurp(dir / "r.json"));
      std::string all = doc["config"].dump() + doc["payload"].dump() + slurp(dir / "r.table.csv");
      if (fs::exists(dir / "r.plot.csv")) all += slurp(dir / "r.plot.csv");
      outputs.push_back(all);
      fs::remove(dir / "r.plot.csv");
    }
    EXPECT_EQ(outputs[0], outputs[1]) << cmd[0] << " differs across worker counts";
    EXPECT_EQ(outputs[0], outputs[2]) << cmd[0] << " differs across reruns";
  }
}

TEST_F(Cli, TailfitAndQQ) {
  std::string values = "value\n";
  for (int i = 1; i <= 40; ++i) values += std::to_string(std::pow(1.2, i)) + "\n";
  write(dir / "v.csv", values);
  auto r = run({"tailfit", "--input", path("v.csv"), "--method", "hill", "--k", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(parse(r.out)["payload"]["alpha_hat"].get<double>(), 0);
  r = run({"tailfit", "--input", path("v.csv"), "--method", "stretchedexp", "--shift", "0",
           "--out", path("fit.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "fit.plot.csv"));
  r = run({"qq", "--input", path("v.csv"), "--tail", "exponential", "--rate", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse(r.out)["payload"]["points"], 40);
  EXPECT_EQ(run({"tailfit", "--input", path("v.csv"), "--method", "hill", "--k", "40"}).code, 2);
}

TEST_F(Cli, TablesRoundTrip) {
  const auto r = run({"bootstrap", "--input", path("items.csv"), "--B", "200", "--seed", "3",
                      "--out", path("b.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir / "b.table.csv");
  const auto t = rankvar::CsvTable::read(in);
  std::ostringstream os;
  t.write(os);
  EXPECT_EQ(os.str(), slurp(dir / "b.table.csv"));
}
