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

#include "bias_audit/wire.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "bias_audit/error.h"
#include "testing/test_util.h"

namespace bias_audit {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;
using ::testing::StartsWith;

std::vector<Instance> Winogender() {
  const auto dir = testing::DataDir() / "winogender";
  return GenerateWinogender(
      LoadTemplates(dir / "templates.tsv", Task::kCoref),
      LoadLexicon(dir / "lexicon.lex"),
      ConstructionDescriptor::ForOperator(Benchmark::kWinogender,
                                          Operator::kBaseline));
}

std::vector<PairInstance> BiasNli() {
  const auto dir = testing::DataDir() / "biasnli";
  return GenerateBiasNli(LoadTemplates(dir / "templates.tsv", Task::kNli),
                         LoadLexicon(dir / "lexicon.lex"),
                         ConstructionDescriptor::ForOperator(
                             Benchmark::kBiasNli, Operator::kBaseline));
}

void WriteLines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& l : lines) out << l << "\n";
}

std::string MessageOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(WireTest, InstanceKeysInFixedOrder) {
  const std::string line = ToJsonLine(Winogender()[0]);
  std::vector<std::size_t> at;
  for (const char* k : {"\"id\"", "\"construction_id\"", "\"task\"",
                        "\"text\"", "\"candidates\"", "\"pronoun\"",
                        "\"pronoun_gender\"", "\"gold\"", "\"metadata\""}) {
    at.push_back(line.find(k));
    ASSERT_NE(at.back(), std::string::npos) << k;
  }
  EXPECT_TRUE(std::is_sorted(at.begin(), at.end()));
  EXPECT_EQ(line.find('\n'), std::string::npos);
}

TEST(WireTest, PairAndPredictionKeys) {
  const std::string pair = ToJsonLine(BiasNli()[0]);
  EXPECT_LT(pair.find("\"premise\""), pair.find("\"hypothesis\""));
  EXPECT_EQ(pair.find("\"candidates\""), std::string::npos);
  EXPECT_EQ(ToJsonLine(Prediction{"abc", "m", "neutral"}),
            R"({"instance_id":"abc","model_id":"m","answer":"neutral"})");
}

TEST(WireTest, RoundTrip) {
  for (const auto& inst : Winogender()) {
    EXPECT_EQ(ParseInstanceLine(ToJsonLine(inst), "x"), inst);
  }
  for (const auto& p : BiasNli()) {
    EXPECT_EQ(ParsePairLine(ToJsonLine(p), "x"), p);
  }
  const Prediction pred{"i", "m", "a \"quoted\" answer"};
  EXPECT_EQ(ParsePredictionLine(ToJsonLine(pred), "x"), pred);
}

TEST(WireTest, StrictKeys) {
  EXPECT_THROW(ParsePredictionLine(
                   R"({"instance_id":"a","model_id":"m","answer":"x","p":1})",
                   "f:1"),
               ValidationError);
  EXPECT_THAT(MessageOf([] {
                ParsePredictionLine(R"({"instance_id":"a","answer":"x"})",
                                    "f:3");
              }),
              StartsWith("f:3"));
  EXPECT_THROW(ParsePredictionLine("not json", "f:1"), ValidationError);
}

TEST(WireTest, ReaderNamesLine) {
  testing::ScopedTempDir tmp;
  const auto path = tmp.path() / "p.jsonl";
  WriteLines(path, {ToJsonLine(Prediction{"a", "m", "x"}), "{broken"});
  EXPECT_THAT(MessageOf([&] { ReadPredictions(path); }), HasSubstr(":2"));
}

TEST(WireTest, WriterCommitsAtomically) {
  testing::ScopedTempDir tmp;
  const auto path = tmp.path() / "out.jsonl";
  {
    JsonlWriter w(path);
    w.Write(Prediction{"a", "m", "x"});
  }
  EXPECT_FALSE(fs::exists(path));
  EXPECT_TRUE(fs::is_empty(tmp.path()));
  JsonlWriter w(path);
  w.Write(Prediction{"a", "m", "x"});
  w.Commit();
  EXPECT_EQ(w.count(), 1u);
  EXPECT_EQ(ToHex64(w.hash()), HashFile(path));
}

TEST(ManifestTest, RoundTripAndTamperDetection) {
  testing::ScopedTempDir tmp;
  const auto data = Winogender();
  Manifest m;
  m.benchmark = Benchmark::kWinogender;
  m.seed = 5;
  {
    JsonlWriter w(tmp.path() / "baseline.jsonl");
    for (const auto& inst : data) w.Write(inst);
    w.Commit();
    m.datasets.push_back(
        {ConstructionDescriptor::ForOperator(Benchmark::kWinogender,
                                             Operator::kBaseline),
         "baseline.jsonl", w.count(), ToHex64(w.hash())});
  }
  m.Save(tmp.path() / kManifestName);
  const auto loaded = Manifest::Load(tmp.path() / kManifestName);
  EXPECT_EQ(loaded.ToJson(), m.ToJson());
  ASSERT_NE(loaded.Find("baseline"), nullptr);
  EXPECT_EQ(loaded.Find("baseline")->count, 720u);
  EXPECT_NO_THROW(VerifyDatasetFile(tmp.path(), *loaded.Find("baseline")));

  std::string content = ReadTextFile(tmp.path() / "baseline.jsonl");
  content[content.find("technician")] = 'T';
  WriteTextFile(tmp.path() / "baseline.jsonl", content);
  EXPECT_THROW(VerifyDatasetFile(tmp.path(), *loaded.Find("baseline")),
               ValidationError);
}

TEST(CsvTest, Quoting) {
  const std::vector<std::string> cells = {"plain", "a,b", "say \"hi\"", ""};
  EXPECT_EQ(CsvLine(cells), "plain,\"a,b\",\"say \"\"hi\"\"\",\n");
}

class ValidatorTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dataset_ = tmp_.path() / "d.jsonl";
    data_ = Winogender();
    std::vector<std::string> lines;
    for (const auto& inst : data_) lines.push_back(ToJsonLine(inst));
    WriteLines(dataset_, lines);
  }

  fs::path Predictions(const std::vector<Prediction>& preds) {
    const auto p = tmp_.path() / "p.jsonl";
    WritePredictions(p, preds);
    return p;
  }

  std::vector<Prediction> Gold(const std::string& model) {
    std::vector<Prediction> out;
    for (const auto& inst : data_) out.push_back({inst.id, model, inst.gold});
    return out;
  }

  testing::ScopedTempDir tmp_;
  fs::path dataset_;
  std::vector<Instance> data_;
};

TEST_F(ValidatorTest, AcceptsGeneratedData) {
  const auto s = ValidateDatasetFile(dataset_);
  EXPECT_EQ(s.records, 720u);
  EXPECT_EQ(s.task, Task::kCoref);
  auto preds = Gold("a");
  const auto b = Gold("b");
  preds.insert(preds.end(), b.begin(), b.end());
  const auto p = ValidatePredictionFile(Predictions(preds), dataset_);
  EXPECT_EQ(p.records, 1440u);
  EXPECT_EQ(p.models, (std::vector<std::string>{"a", "b"}));
}

TEST_F(ValidatorTest, RejectsEditedText) {
  data_[3].text += " Extra.";
  data_[3].metadata["slot.OCCUPATION"] = "someone else";
  std::vector<std::string> lines;
  for (const auto& inst : data_) lines.push_back(ToJsonLine(inst));
  WriteLines(dataset_, lines);
  EXPECT_THAT(MessageOf([&] { ValidateDatasetFile(dataset_); }),
              HasSubstr(":4"));
}

TEST_F(ValidatorTest, RejectsGoldOutsideCandidates) {
  data_[0].gold = "nobody";
  WriteLines(dataset_, {ToJsonLine(data_[0])});
  EXPECT_THROW(ValidateDatasetFile(dataset_), ValidationError);
}

TEST_F(ValidatorTest, MissingCoverage) {
  auto preds = Gold("a");
  preds.pop_back();
  EXPECT_THROW(ValidatePredictionFile(Predictions(preds), dataset_),
               MissingPredictionError);
  EXPECT_NO_THROW(ValidatePredictionFile(Predictions(preds), std::nullopt));
}

TEST_F(ValidatorTest, AnswerOutsideCandidates) {
  auto preds = Gold("a");
  preds[5].answer = "(a) technician";
  EXPECT_THAT(MessageOf([&] {
                ValidatePredictionFile(Predictions(preds), dataset_);
              }),
              HasSubstr(":6"));
}

TEST_F(ValidatorTest, DuplicatePrediction) {
  auto preds = Gold("a");
  preds.push_back(preds[0]);
  EXPECT_THROW(ValidatePredictionFile(Predictions(preds), dataset_),
               ValidationError);
}

}  // namespace
}  // namespace bias_audit
