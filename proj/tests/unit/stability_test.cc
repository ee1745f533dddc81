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

#include "bias_audit/stability.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bias_audit/construction.h"
#include "bias_audit/error.h"
#include "bias_audit/reference_models.h"
#include "testing/test_util.h"

namespace bias_audit {
namespace {

std::vector<BiasScore> Table2Row(const std::string& construction) {
  std::vector<BiasScore> out;
  for (const auto& r : testing::LoadCounts(testing::DataDir() / "fixtures" /
                                           "table2_counts.csv")) {
    if (r.construction == construction) {
      out.push_back({r.model, construction, Metric::kNeutralPct, r.count, r.n});
    }
  }
  return out;
}

std::vector<std::string> Order(const Ranking& r) {
  std::vector<std::string> out;
  for (const auto& e : r.entries) out.push_back(e.model_id);
  return out;
}

Ranking Ranked(const std::vector<std::pair<std::string, uint64_t>>& scores) {
  std::vector<BiasScore> s;
  for (const auto& [m, c] : scores) {
    s.push_back({m, "c", Metric::kMfMismatchPct, c, 100});
  }
  return RankModels(s);
}

// Pairs ordered strictly one way in `a` and the other way in `b`,
// by enumeration over every pair.
std::size_t BruteForceInversions(const Ranking& a, const Ranking& b) {
  std::size_t n = 0;
  for (const auto& x : a.entries) {
    for (const auto& y : a.entries) {
      if (x.model_id >= y.model_id) continue;
      const int da = x.rank - y.rank;
      const int db = b.Find(x.model_id)->rank - b.Find(y.model_id)->rank;
      n += (da < 0 && db > 0) || (da > 0 && db < 0);
    }
  }
  return n;
}

TEST(RankingTest, Table2Baseline) {
  const auto r = RankModels(Table2Row("baseline"));
  EXPECT_EQ(Order(r),
            (std::vector<std::string>{"distilroberta", "albert", "elmo-da",
                                      "roberta-large-wanli",
                                      "roberta-base-snli"}));
  EXPECT_EQ(r.entries.front().rank, 1);
  EXPECT_EQ(r.entries.back().rank, 5);
  EXPECT_EQ(r.construction_id, "baseline");
}

TEST(RankingTest, SingleModel) {
  const auto r = Ranked({{"only", 5}});
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].rank, 1);
}

TEST(RankingTest, TiesShareMinimumRank) {
  const auto r = Ranked({{"c", 10}, {"b", 5}, {"a", 5}});
  EXPECT_EQ(Order(r), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(r.entries[0].rank, 1);
  EXPECT_EQ(r.entries[1].rank, 1);
  EXPECT_EQ(r.entries[2].rank, 3);
}

TEST(RankingTest, RejectsMixedInput) {
  std::vector<BiasScore> s = {{"a", "x", Metric::kMfMismatchPct, 1, 2},
                              {"a", "x", Metric::kMfMismatchPct, 1, 3}};
  EXPECT_THROW(RankModels(s), ValidationError);
  s[1] = {"b", "x", Metric::kNeutralPct, 1, 3};
  EXPECT_THROW(RankModels(s), ValidationError);
}

TEST(RankingTest, InvariantUnderMonotoneRescaling) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<BiasScore> s, scaled;
    for (int m = 0; m < 6; ++m) {
      const uint64_t c = rng() % 101;
      s.push_back({"m" + std::to_string(m), "x", Metric::kNeutralPct, c, 100});
      // Same percentage over a larger denominator.
      scaled.push_back(
          {"m" + std::to_string(m), "x", Metric::kNeutralPct, c * 7, 700});
    }
    const auto a = RankModels(s);
    const auto b = RankModels(scaled);
    EXPECT_EQ(Order(a), Order(b));
    EXPECT_EQ(RankInversions(a, b).kendall_distance, 0u);
  }
}

TEST(InversionTest, Table2NegationFlipsElmoAndRobertaBase) {
  const auto base = RankModels(Table2Row("baseline"));
  const auto neg = RankModels(Table2Row("negation"));
  const auto rep = RankInversions(base, neg);
  EXPECT_EQ(rep.a_id, "baseline");
  EXPECT_EQ(rep.b_id, "negation");
  EXPECT_NE(std::find(rep.inversions.begin(), rep.inversions.end(),
                      ModelPair::Of("roberta-base-snli", "elmo-da")),
            rep.inversions.end());
  EXPECT_EQ(rep.kendall_distance, rep.inversions.size());
  EXPECT_EQ(rep.kendall_distance, BruteForceInversions(base, neg));
}

TEST(InversionTest, IdenticalRankings) {
  const auto r = Ranked({{"a", 1}, {"b", 2}});
  const auto rep = RankInversions(r, r);
  EXPECT_TRUE(rep.inversions.empty());
  EXPECT_EQ(rep.kendall_distance, 0u);
}

TEST(InversionTest, FullReversal) {
  const auto rep = RankInversions(Ranked({{"A", 1}, {"B", 2}, {"C", 3}}),
                                  Ranked({{"A", 3}, {"B", 2}, {"C", 1}}));
  EXPECT_EQ(rep.kendall_distance, 3u);
  EXPECT_EQ(rep.inversions,
            (std::vector<ModelPair>{ModelPair::Of("A", "B"),
                                    ModelPair::Of("A", "C"),
                                    ModelPair::Of("B", "C")}));
}

TEST(InversionTest, TiesAreNotInversions) {
  const auto rep = RankInversions(Ranked({{"A", 1}, {"B", 2}}),
                                  Ranked({{"A", 2}, {"B", 2}}));
  EXPECT_EQ(rep.kendall_distance, 0u);
}

TEST(InversionTest, RandomRankingsMatchBruteForceAndBounds) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<std::pair<std::string, uint64_t>> x, y;
    for (int m = 0; m < n; ++m) {
      x.push_back({"m" + std::to_string(m), rng() % 5});
      y.push_back({"m" + std::to_string(m), rng() % 5});
    }
    const auto a = Ranked(x);
    const auto b = Ranked(y);
    const auto ab = RankInversions(a, b);
    EXPECT_EQ(ab.kendall_distance, BruteForceInversions(a, b));
    EXPECT_EQ(ab.kendall_distance, RankInversions(b, a).kendall_distance);
    EXPECT_LE(ab.kendall_distance, static_cast<std::size_t>(n * (n - 1) / 2));
  }
}

TEST(InversionTest, DifferentModelSets) {
  EXPECT_THROW(RankInversions(Ranked({{"A", 1}}), Ranked({{"B", 1}})),
               ValidationError);
}

TEST(SummaryTest, Quartiles) {
  const std::vector<double> v = {1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(Quantile(v, 0.25), 2);
  EXPECT_DOUBLE_EQ(Quantile(v, 0.5), 3);
  const std::vector<double> w = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(Quantile(w, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(Quantile(w, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(Quantile(w, 1.0), 4);
}

TEST(SummaryTest, SampleStddev) {
  const auto s = Summarize(std::vector<double>{4, 2, 6, 8});
  EXPECT_EQ(s.n, 4u);
  EXPECT_DOUBLE_EQ(s.mean, 5);
  EXPECT_DOUBLE_EQ(s.stddev, std::sqrt(20.0 / 3.0));
  EXPECT_DOUBLE_EQ(s.min, 2);
  EXPECT_DOUBLE_EQ(s.max, 8);
  EXPECT_DOUBLE_EQ(s.median, 5);
  EXPECT_DOUBLE_EQ(Summarize(std::vector<double>{3}).stddev, 0);
}

class DistributionTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto dir = testing::DataDir();
    templates_ = LoadTemplates(dir / "biasnli" / "templates.tsv", Task::kNli);
    lexicon_ = LoadLexicon(dir / "biasnli" / "lexicon.lex");
    baseline_ = GenerateBiasNli(
        templates_, lexicon_,
        ConstructionDescriptor::ForOperator(Benchmark::kBiasNli,
                                            Operator::kBaseline));
    registry_ = ModelRegistry::Load(dir / "reference" / "models.cfg");
  }

  TrialPredictor Predictor() const {
    return [this](const ConstructionDescriptor&,
                  std::span<const PairInstance> data) {
      std::vector<Prediction> out;
      for (const char* name : {"toy-nli-a", "toy-nli-b"}) {
        auto p = registry_.Get(name).Predict(data);
        out.insert(out.end(), p.begin(), p.end());
      }
      return out;
    };
  }

  BiasScore Full(const std::string& model) const {
    return FractionNeutral(baseline_, registry_.Get(model).Predict(baseline_));
  }

  std::vector<Template> templates_;
  Lexicon lexicon_;
  std::vector<PairInstance> baseline_;
  ModelRegistry registry_;
};

TEST_F(DistributionTest, FullProportionReproducesBaseline) {
  const auto dists =
      SubsamplingDistribution(baseline_, Predictor(), 1.0, 5, 42);
  ASSERT_EQ(dists.size(), 2u);
  for (const auto& d : dists) {
    const auto full = Full(d.model_id);
    ASSERT_EQ(d.scores.size(), 5u);
    for (const auto& s : d.scores) {
      EXPECT_EQ(s.count, full.count);
      EXPECT_EQ(s.n, full.n);
    }
    EXPECT_DOUBLE_EQ(d.summary.stddev, 0);
  }
}

TEST_F(DistributionTest, DeterministicAcrossRunsAndThreads) {
  const auto a = SubsamplingDistribution(baseline_, Predictor(), 0.5, 20, 7);
  const auto b = SubsamplingDistribution(baseline_, Predictor(), 0.5, 20, 7, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].scores, b[i].scores);
    EXPECT_EQ(a[i].seeds, b[i].seeds);
  }
  EXPECT_EQ(a[0].seeds[3], DeriveTrialSeed(7, 3));
  const auto c = SubsamplingDistribution(baseline_, Predictor(), 0.5, 20, 8);
  EXPECT_NE(a[0].values(), c[0].values());
}

TEST_F(DistributionTest, ScoresTrialDatasetSizes) {
  const auto d = SubsamplingDistribution(baseline_, Predictor(), 0.1, 3, 1);
  // One of ten occupations stays, so a tenth of the pairs.
  for (const auto& s : d[0].scores) EXPECT_EQ(s.n, baseline_.size() / 10);
}

TrialDistribution Dist(const std::string& model,
                       const std::vector<uint64_t>& counts) {
  TrialDistribution d;
  d.model_id = model;
  for (uint64_t c : counts) {
    d.scores.push_back({model, "t", Metric::kNeutralPct, c, 100});
  }
  return d;
}

BiasScore FullScore(const std::string& model, uint64_t count) {
  return {model, "baseline", Metric::kNeutralPct, count, 100};
}

TEST(OverlapTest, DisjointRanges) {
  EXPECT_DOUBLE_EQ(DistributionOverlap(Dist("a", {80, 90, 85}),
                                       Dist("b", {10, 20, 15}),
                                       FullScore("a", 85), FullScore("b", 15)),
                   0.0);
}

TEST(OverlapTest, IdenticalVectorsAreTies) {
  const auto a = Dist("a", {10, 50, 30});
  const auto b = Dist("b", {10, 50, 30});
  EXPECT_DOUBLE_EQ(
      DistributionOverlap(a, b, FullScore("a", 30), FullScore("b", 30)), 0.0);
}

TEST(OverlapTest, CountsFlippedTrials) {
  // Full order: a less biased (more neutral). Trials 2 and 4 flip, 3 ties.
  const auto a = Dist("a", {60, 40, 50, 30});
  const auto b = Dist("b", {50, 45, 50, 35});
  EXPECT_DOUBLE_EQ(
      DistributionOverlap(a, b, FullScore("a", 60), FullScore("b", 50)), 0.5);
  EXPECT_DOUBLE_EQ(
      DistributionOverlap(b, a, FullScore("b", 50), FullScore("a", 60)), 0.5);
}

TEST(OverlapTest, MismatchedTrialCounts) {
  EXPECT_THROW(DistributionOverlap(Dist("a", {1, 2}), Dist("b", {1}),
                                   FullScore("a", 1), FullScore("b", 1)),
               ValidationError);
}

}  // namespace
}  // namespace bias_audit
