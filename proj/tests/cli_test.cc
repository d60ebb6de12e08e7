/*
 * Copyright 2026 The SMITE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "smite/cli.h"

#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>
#include <sstream>

#include "smite/data.h"
#include "test_util.h"

namespace smite {
namespace {

using ::smite::testing::ReadFile;
using ::smite::testing::TestDir;
using ::smite::testing::WriteFile;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunSmite(std::vector<std::string> args) {
  args.insert(args.begin(), "smite");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Small, fast benchmark settings.
std::vector<std::string> TinyBenchmark(const std::string& out) {
  return {"benchmark",         "--n",          "400",  "--p",
          "3",                 "--runs",       "2",    "--epochs",
          "2",                 "--hidden-widths", "4,4", "--linear-prefix",
          "1",                 "--logistic-iterations", "50", "--qini-grid",
          "20",                "--kendall-bins", "4",  "--out",
          out};
}

TEST(CliTest, SimulateParametricIsDeterministic) {
  const auto dir = TestDir();
  for (const char* sub : {"a", "b"}) {
    const Result r = RunSmite({"simulate", "--n", "1000", "--p", "10", "--seed", "7",
                          "--out", (dir / sub).string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("n=1000 p=10"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("seed=7"), std::string::npos) << r.out;
  }
  EXPECT_EQ(ReadFile(dir / "a" / "data.csv"), ReadFile(dir / "b" / "data.csv"));
  EXPECT_EQ(ReadFile(dir / "a" / "truth.csv"), ReadFile(dir / "b" / "truth.csv"));
  const UpliftDataset ds = LoadCsv((dir / "a" / "data.csv").string(), "y", "t");
  EXPECT_EQ(ds.size(), 1000u);
  EXPECT_EQ(ds.num_features(), 10u);
  // Provenance travels with the data.
  EXPECT_NE(ReadFile(dir / "a" / "data.csv").find("# seed=7"), std::string::npos);
}

TEST(CliTest, TruthMeanTracksEmpiricalAte) {
  const auto dir = TestDir();
  ASSERT_EQ(RunSmite({"simulate", "--n", "20000", "--p", "5", "--seed", "3", "--out",
                 dir.string()}).code,
            0);
  const UpliftDataset ds = LoadCsv((dir / "data.csv").string(), "y", "t");
  std::istringstream truth(ReadFile(dir / "truth.csv"));
  std::string line;
  double sum = 0;
  std::size_t rows = 0;
  while (std::getline(truth, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'r') continue;
    sum += std::stod(line.substr(line.find(',') + 1));
    ++rows;
  }
  ASSERT_EQ(rows, ds.size());
  double y1 = 0, y0 = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.treatment()[i] == 1 ? y1 : y0) += ds.outcome()[i];
  }
  const double n1 = ds.num_treated(), n0 = ds.num_control();
  const double p1 = y1 / n1, p0 = y0 / n0;
  const double se = std::sqrt(p1 * (1 - p1) / n1 + p0 * (1 - p0) / n0);
  EXPECT_NEAR(p1 - p0, sum / rows, 3 * se);
}

TEST(CliTest, UsageErrors) {
  const auto dir = TestDir();
  EXPECT_EQ(RunSmite({"simulate", "--mode", "bootstrap", "--out", dir.string()}).code,
            kExitUsage);
  WriteFile(dir / "d.csv", "a,y,t\n1,0,1\n2,1,0\n");
  const Result boot = RunSmite({"simulate", "--mode", "bootstrap", "--data",
                           (dir / "d.csv").string(), "--out", dir.string()});
  EXPECT_EQ(boot.code, kExitUsage);
  EXPECT_NE(boot.err.find("generator_model"), std::string::npos) << boot.err;
  EXPECT_EQ(RunSmite({"benchmark", "--data", (dir / "nope.csv").string()}).code,
            kExitUsage);
  EXPECT_EQ(RunSmite({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(RunSmite({"simulate", "--no-such-flag", "1"}).code, kExitUsage);
  EXPECT_EQ(RunSmite({"simulate", "--n", "abc"}).code, kExitUsage);
  WriteFile(dir / "bad.cfg", "unknown_key = 3\n");
  EXPECT_EQ(RunSmite({"simulate", "--config", (dir / "bad.cfg").string()}).code,
            kExitUsage);
  const Result alpha = RunSmite({"benchmark", "--alpha", "2", "--out", dir.string()});
  EXPECT_EQ(alpha.code, kExitUsage);
  EXPECT_NE(alpha.err.find("alpha"), std::string::npos);
}

TEST(CliTest, DataErrorsExitTwo) {
  const auto dir = TestDir();
  WriteFile(dir / "d.csv", "a,y,t\n1,0,1\n2,1,7\n");
  EXPECT_EQ(RunSmite({"benchmark", "--data", (dir / "d.csv").string(), "--out",
                 dir.string()}).code,
            kExitData);
}

TEST(CliTest, FlagsOverrideConfigFile) {
  const auto dir = TestDir();
  WriteFile(dir / "c.cfg", "n = 50\np = 2\nseed = 1\n");
  ASSERT_EQ(RunSmite({"simulate", "--config", (dir / "c.cfg").string(), "--seed", "9",
                 "--out", dir.string()}).code,
            0);
  const std::string resolved = ReadFile(dir / "resolved_config.txt");
  EXPECT_NE(resolved.find("seed=9\n"), std::string::npos);
  EXPECT_NE(resolved.find("n=50\n"), std::string::npos);
}

TEST(CliTest, IdenticalRunsHaveZeroStandardError) {
  const auto dir = TestDir();
  auto args = TinyBenchmark(dir.string());
  args.push_back("--identical-runs");
  const Result r = RunSmite(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(ReadFile(dir / "aggregate.json"));
  for (const auto& row : j["aggregate"]) {
    EXPECT_EQ(row["successful_runs"], 2);
    EXPECT_EQ(row["two_se"].get<double>(), 0.0) << row.dump();
  }
}

TEST(CliTest, BenchmarkRerunFromResolvedConfigIsBitIdentical) {
  const auto dir = TestDir();
  const Result first = RunSmite(TinyBenchmark((dir / "a").string()));
  ASSERT_EQ(first.code, 0) << first.err;
  const auto j = nlohmann::json::parse(ReadFile(dir / "a" / "aggregate.json"));
  EXPECT_EQ(j["config"]["seed"], "0");
  const Result second = RunSmite({"benchmark", "--config",
                             (dir / "a" / "resolved_config.txt").string(),
                             "--workers", "2", "--out", (dir / "b").string()});
  ASSERT_EQ(second.code, 0) << second.err;
  for (const char* f : {"runs.csv", "aggregate.csv", "aggregate.json",
                        "curve_smite_ie.csv", "model_smite_ie.txt",
                        "model_smite_to.txt", "model_two_model.txt",
                        "model_interaction.txt", "curve_oracle.csv"}) {
    EXPECT_EQ(ReadFile(dir / "a" / f), ReadFile(dir / "b" / f)) << f;
    EXPECT_FALSE(ReadFile(dir / "a" / f).empty()) << f;
  }
}

TEST(CliTest, EvaluateSavedModelHonoursFlags) {
  const auto dir = TestDir();
  ASSERT_EQ(RunSmite(TinyBenchmark((dir / "bench").string())).code, 0);
  ASSERT_EQ(RunSmite({"simulate", "--n", "300", "--p", "3", "--seed", "5", "--out",
                 (dir / "data").string()}).code,
            0);
  const std::string model = (dir / "bench" / "model_smite_ie.txt").string();
  const std::string data = (dir / "data" / "data.csv").string();
  const Result plain = RunSmite({"evaluate", "--model", model, "--data", data,
                            "--qini-grid", "10", "--out", (dir / "e1").string()});
  ASSERT_EQ(plain.code, 0) << plain.err;
  const Result literal =
      RunSmite({"evaluate", "--model", model, "--data", data, "--qini-grid", "10",
           "--qini-literal", "--out", (dir / "e2").string()});
  ASSERT_EQ(literal.code, 0) << literal.err;
  const auto a = nlohmann::json::parse(ReadFile(dir / "e1" / "report.json"));
  const auto b = nlohmann::json::parse(ReadFile(dir / "e2" / "report.json"));
  EXPECT_EQ(a["model_type"], "smite");
  EXPECT_EQ(b["config"]["qini_literal"], "true");
  EXPECT_NE(a["qini"].get<double>(), b["qini"].get<double>());
  // 11 grid points plus header and provenance comments.
  const std::string curve = ReadFile(dir / "e1" / "curve.csv");
  EXPECT_NE(curve.find("phi,f,q\n"), std::string::npos);
  EXPECT_EQ(std::count(curve.begin(), curve.end(), '\n') -
                std::count(curve.begin(), curve.end(), '#'),
            12);
}

TEST(CliTest, TuneWritesBothParameters) {
  const auto dir = TestDir();
  const Result r = RunSmite({"tune", "--n", "300", "--p", "3", "--folds", "2",
                        "--epochs", "1", "--hidden-widths", "4",
                        "--linear-prefix", "0", "--qini-grid", "10", "--out",
                        dir.string()});
  ASSERT_TRUE(r.code == kExitOk || r.code == kExitTuneFallback) << r.err;
  const auto j = nlohmann::json::parse(ReadFile(dir / "tune.json"));
  ASSERT_EQ(j["results"].size(), 2u);
  EXPECT_EQ(j["results"][0]["parameter"], "alpha");
  EXPECT_EQ(j["results"][0]["candidates"].size(), 11u);
  EXPECT_EQ(j["results"][1]["parameter"], "learning_rate");
  const bool fallback = j["results"][0]["fallback"].get<bool>() ||
                        j["results"][1]["fallback"].get<bool>();
  EXPECT_EQ(r.code, fallback ? kExitTuneFallback : kExitOk);
  EXPECT_NE(ReadFile(dir / "tune_folds.csv").find("parameter,value,fold,qini"),
            std::string::npos);
}

}  // namespace
}  // namespace smite
