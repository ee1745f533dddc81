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

#include "bias_audit/perturbation.h"

#include <algorithm>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "bias_audit/error.h"
#include "bias_audit/fnv.h"
#include "testing/test_util.h"

namespace bias_audit {
namespace {

using ::testing::IsEmpty;

Instance CorefInstance(const std::string& text, const std::string& occupation,
                       const std::string& participant) {
  Instance inst;
  inst.id = "i";
  inst.text = text;
  inst.candidates = {occupation, participant};
  inst.pronoun = "he";
  inst.gold = occupation;
  inst.metadata = {{"template_id", "t"},
                   {"occupation", occupation},
                   {"participant", participant}};
  return inst;
}

PairInstance Pair(const std::string& premise, const std::string& hypothesis,
                  const std::string& verb) {
  PairInstance p;
  p.id = "p";
  p.premise = premise;
  p.hypothesis = hypothesis;
  p.metadata = {{"occupation", "doctor"}, {"subject", "man"}, {"verb", verb}};
  return p;
}

TEST(PerturbationTest, ClauseAfterParticipant) {
  const auto inst = CorefInstance(
      "The customer left the bartender a big tip because he was feeling "
      "generous.",
      "bartender", "customer");
  const auto out = InsertClause(inst, "who just returned from the beach",
                                Target::kParticipant);
  EXPECT_EQ(out.text,
            "The customer, who just returned from the beach, left the "
            "bartender a big tip because he was feeling generous.");
  EXPECT_EQ(out.gold, inst.gold);
  EXPECT_EQ(out.candidates, inst.candidates);
  EXPECT_EQ(out.id, inst.id);
}

TEST(PerturbationTest, ClauseOnBothSidesOfPair) {
  const auto out = InsertClause(
      Pair("The doctor bought a coat.", "The man bought a coat.", "bought"),
      "who came in the afternoon");
  EXPECT_EQ(out.premise, "The doctor, who came in the afternoon, bought a coat.");
  EXPECT_EQ(out.hypothesis, "The man, who came in the afternoon, bought a coat.");
  EXPECT_EQ(out.gold_label, "neutral");
}

TEST(PerturbationTest, EmptyClause) {
  EXPECT_THROW(InsertClauseAfter("The doctor left.", "doctor", ""),
               ValidationError);
  EXPECT_THROW(InsertClauseAfter("The doctor left.", "doctor", "  "),
               ValidationError);
}

TEST(PerturbationTest, AdjectiveModes) {
  EXPECT_EQ(InsertAdjectiveAt("The doctor left.", "doctor", "good",
                              AdjectiveMode::kPreModifier),
            "The good doctor left.");
  EXPECT_EQ(InsertAdjectiveAt("I saw the doctor today.", "doctor", "good",
                              AdjectiveMode::kRelativeClause),
            "I saw the doctor who was good today.");
}

TEST(PerturbationTest, IndefiniteArticleRepairOverAdjectivePool) {
  const auto pools = PerturbationPools::Load(
      testing::DataDir() / "pools.cfg", "");
  ASSERT_FALSE(pools.adjectives.empty());
  for (const auto& adj : pools.adjectives) {
    const bool vowel_sound =
        std::string("aeiou").find(adj[0]) != std::string::npos ||
        adj.rfind("hon", 0) == 0;
    const std::string article = vowel_sound ? "an" : "a";
    EXPECT_EQ(InsertAdjectiveAt("She met a doctor.", "doctor", adj,
                                AdjectiveMode::kPreModifier),
              "She met " + article + " " + adj + " doctor.");
    EXPECT_EQ(InsertAdjectiveAt("An engineer left.", "engineer", adj,
                                AdjectiveMode::kPreModifier),
              (vowel_sound ? "An " : "A ") + adj + " engineer left.");
  }
}

TEST(PerturbationTest, IndefinitePronounTakesPostposedAdjective) {
  EXPECT_EQ(InsertAdjectiveAt("Someone paid the clerk.", "Someone", "rude",
                              AdjectiveMode::kPreModifier),
            "Someone rude paid the clerk.");
}

TEST(PerturbationTest, SynonymExamples) {
  SynonymTable table = {
      {"t", {{"stellar", "amazing"}}},
      {"u", {{"had requested", "had asked for"}}},
  };
  auto a = CorefInstance(
      "The supervisor gave the employee feedback on his stellar performance.",
      "supervisor", "employee");
  EXPECT_EQ(SubstituteSynonyms(a, table).text,
            "The supervisor gave the employee feedback on his amazing "
            "performance.");
  auto b = CorefInstance(
      "The doctor called the patient who had requested a phone "
      "consultation.",
      "doctor", "patient");
  b.metadata["template_id"] = "u";
  EXPECT_EQ(SubstituteSynonyms(b, table).text,
            "The doctor called the patient who had asked for a phone "
            "consultation.");
}

TEST(PerturbationTest, EmptySynonymTableIsIdentity) {
  const auto a = CorefInstance("The clerk helped him.", "clerk", "customer");
  EXPECT_EQ(SubstituteSynonyms(a, {}), a);
}

TEST(PerturbationTest, SynonymMayNotTouchEntities) {
  SynonymTable table = {{"t", {{"clerk", "cashier"}}}};
  EXPECT_THROW(
      SubstituteSynonyms(
          CorefInstance("The clerk helped him.", "clerk", "customer"), table),
      ValidationError);
}

TEST(PerturbationTest, Negation) {
  const NegationTable table = {{"bought", "buy"}, {"ate", "eat"}};
  const auto out = NegateVerb(
      Pair("The doctor bought a bagel.", "The man bought a bagel.", "bought"),
      table);
  EXPECT_EQ(out.premise, "The doctor did not buy a bagel.");
  EXPECT_EQ(out.hypothesis, "The man did not buy a bagel.");
  EXPECT_EQ(NegateVerb(Pair("The doctor ate a bagel.", "The man ate a bagel.",
                            "ate"),
                       table)
                .premise,
            "The doctor did not eat a bagel.");
  EXPECT_THROW(NegateVerb(Pair("The doctor did not buy a bagel.",
                               "The man did not buy a bagel.", "buy"),
                          table),
               ValidationError);
}

TEST(PerturbationTest, ShippedNegationTableCoversDemoVerbs) {
  const auto pools = PerturbationPools::Load(
      testing::DataDir() / "pools.cfg", "");
  for (const char* lex : {"lexicon.lex", "lexicon_full.lex"}) {
    for (const auto& v :
         LoadLexicon(testing::DataDir() / "biasnli" / lex).verbs) {
      EXPECT_TRUE(pools.negations.count(v)) << v;
    }
  }
}

TEST(SubsampleTest, Counts) {
  EXPECT_EQ(SubsampleCount(0.1, 164), 16u);
  EXPECT_EQ(SubsampleCount(0.25, 164), 41u);
  EXPECT_EQ(SubsampleCount(0.5, 164), 82u);
  EXPECT_EQ(SubsampleCount(1.0, 164), 164u);
  EXPECT_EQ(SubsampleCount(0.5, 5), 3u);
  EXPECT_THROW(SubsampleCount(0.0, 10), ValidationError);
  EXPECT_THROW(SubsampleCount(1.5, 10), ValidationError);
}

TEST(SubsampleTest, FullProportionIsIdentity) {
  const auto lex =
      LoadLexicon(testing::DataDir() / "biasnli" / "lexicon_full.lex");
  ASSERT_EQ(lex.occupations.size(), 164u);
  EXPECT_EQ(SubsampleLexicon(lex, 1.0, 99), lex);
}

TEST(SubsampleTest, KeepsSmallestSeededHashes) {
  const std::vector<std::string> words = {"a", "b", "c", "d"};
  // Independent FNV-1a over (42 as LE8) || word.
  auto oracle = [](const std::string& w) {
    uint64_t h = 0xcbf29ce484222325ULL;
    std::string bytes(8, '\0');
    bytes[0] = 42;
    bytes += w;
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  };
  std::vector<std::string> by_hash = words;
  std::sort(by_hash.begin(), by_hash.end(),
            [&](const auto& x, const auto& y) { return oracle(x) < oracle(y); });
  std::vector<std::string> expected(by_hash.begin(), by_hash.begin() + 2);
  std::sort(expected.begin(), expected.end());
  auto got = SubsampleWords(words, 0.5, 42);
  EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
  EXPECT_EQ(got, expected);
}

TEST(PerturbationInvariantTest, ExhaustiveOverShippedData) {
  EXPECT_THAT(testing::PerturbationViolations(), IsEmpty());
}

TEST(PerturbationSpecTest, RejectsEmptyPools) {
  const PerturbationPools empty;
  for (Operator op : {Operator::kClauses, Operator::kNegation}) {
    const auto spec = PerturbationSpec::For(
        ConstructionDescriptor::ForOperator(Benchmark::kBiasNli, op), empty);
    EXPECT_THROW(spec.Validate(), ValidationError);
  }
  const auto base = PerturbationSpec::For(
      ConstructionDescriptor::ForOperator(Benchmark::kBiasNli,
                                          Operator::kBaseline),
      empty);
  EXPECT_NO_THROW(base.Validate());
}

TEST(PerturbationSpecTest, ShippedSynonymTableIsValid) {
  const auto templates = LoadTemplates(
      testing::DataDir() / "winogender" / "templates.tsv", Task::kCoref);
  EXPECT_NO_THROW(ValidateSynonymTable(
      LoadSynonymTable(testing::DataDir() / "winogender" / "synonyms.tsv"),
      templates));
  EXPECT_THROW(ValidateSynonymTable({{"no.such.template", {{"a", "b"}}}},
                                    templates),
               ValidationError);
}

}  // namespace
}  // namespace bias_audit
