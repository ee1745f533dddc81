/* Copyright 2026 The Bias Audit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Runs the bias_audit binary end to end and checks exit codes and outputs.

#include <filesystem>
#include <string>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "bias_audit/wire.h"
#include "testing/test_util.h"

namespace bias_audit {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

class CliTest : public ::testing::Test {
 protected:
  int Run(const std::string& args, std::string* out = nullptr) {
    std::string ignored;
    return testing::RunCommand(
        "BIAS_AUDIT_DATA_DIR='" + testing::DataDir().string() + "' '" +
            testing::CliPath().string() + "' " + args + " 2>&1",
        out ? out : &ignored);
  }
  std::string Dir(const std::string& name) {
    return "'" + (tmp_.path() / name).string() + "'";
  }

  testing::ScopedTempDir tmp_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Run("--help"), 0);
  EXPECT_EQ(Run(""), 1);
  EXPECT_EQ(Run("generate --no-such-flag"), 1);
}

TEST_F(CliTest, GenerateScoreReport) {
  std::string out;
  ASSERT_EQ(Run("generate --benchmark winogender --construction baseline "
                "--construction clause_participant --out " + Dir("gen"),
                &out),
            0)
      << out;
  EXPECT_THAT(out, HasSubstr("baseline.jsonl\t720\t"));
  ASSERT_EQ(Run("predict --datasets " + Dir("gen") +
                " --model positional --model blended --out " +
                Dir("preds.jsonl"), &out),
            0) << out;
  ASSERT_EQ(Run("validate --dataset " + Dir("gen/baseline.jsonl"), &out), 0)
      << out;
  ASSERT_EQ(Run("score --datasets " + Dir("gen") + " --predictions " +
                Dir("preds.jsonl") + " --out " + Dir("scores"), &out),
            0) << out;
  EXPECT_THAT(out, HasSubstr("positional"));
  EXPECT_EQ(ReadTextFile(tmp_.path() / "scores" / "scores.csv").substr(0, 40),
            "construction,positional,blended\nbaseline");
  ASSERT_EQ(Run("report --out " + Dir("scores"), &out), 0);
  EXPECT_TRUE(fs::exists(tmp_.path() / "scores" / "report.txt"));
}

TEST_F(CliTest, ExitCodes) {
  ASSERT_EQ(Run("generate --benchmark biasnli --construction baseline --out " +
                Dir("gen")),
            0);
  // Invalid construction for the benchmark.
  EXPECT_EQ(Run("generate --benchmark biasnli --construction synonyms --out " +
                Dir("bad")),
            1);
  EXPECT_FALSE(fs::exists(tmp_.path() / "bad"));
  // Predictions for all but one pair.
  const Dataset d = ReadDataset(tmp_.path() / "gen" / "baseline.jsonl");
  std::vector<Prediction> preds;
  for (const auto& id : d.ids()) preds.push_back({id, "m", "neutral"});
  preds.pop_back();
  WritePredictions(tmp_.path() / "p.jsonl", preds);
  std::string out;
  EXPECT_EQ(Run("score --datasets " + Dir("gen") + " --predictions " +
                    Dir("p.jsonl") + " --out " + Dir("s"),
                &out),
            2)
      << out;
  EXPECT_EQ(Run("validate --dataset " + Dir("gen/baseline.jsonl") +
                " --predictions " + Dir("p.jsonl")),
            2);
  // A malformed prediction line.
  WriteTextFile(tmp_.path() / "p.jsonl", "{\"instance_id\": 3}\n");
  EXPECT_EQ(Run("validate --predictions " + Dir("p.jsonl"), &out), 1);
  EXPECT_THAT(out, HasSubstr(":1"));
}

TEST_F(CliTest, GenerateIsByteIdenticalAcrossJobs) {
  for (const char* jobs : {"1", "4"}) {
    ASSERT_EQ(Run("generate --benchmark biasnli --construction baseline "
                  "--construction negation --construction subsample "
                  "--trials 5 --seed 11 --jobs " + std::string(jobs) +
                  " --out " + Dir(std::string("j") + jobs)),
              0);
  }
  for (const auto& e : fs::directory_iterator(tmp_.path() / "j1")) {
    const auto name = e.path().filename();
    EXPECT_EQ(ReadTextFile(e.path()), ReadTextFile(tmp_.path() / "j4" / name))
        << name;
  }
}

TEST_F(CliTest, StabilityOnDemoModels) {
  std::string out;
  ASSERT_EQ(Run("stability --benchmark biasnli --construction baseline "
                "--construction negation --model toy-nli-a --model toy-nli-b "
                "--trials 10 --proportion 0.5 --out " + Dir("st"), &out),
            0)
      << out;
  EXPECT_THAT(out, HasSubstr("Rank inversions vs baseline"));
  EXPECT_TRUE(fs::exists(tmp_.path() / "st" / "distribution.csv"));
}

}  // namespace
}  // namespace bias_audit
