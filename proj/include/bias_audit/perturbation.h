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

// Meaning-preserving alternate-construction operators. Item-level operators
// keep ids, gold labels, candidates and pronouns untouched; callers re-key.

#ifndef BIAS_AUDIT_PERTURBATION_H_
#define BIAS_AUDIT_PERTURBATION_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bias_audit/construction.h"
#include "bias_audit/schema.h"

namespace bias_audit {

struct SynonymEdit {
  std::string span;
  std::string replacement;

  bool operator==(const SynonymEdit&) const = default;
};

// template id -> edits applied in order.
using SynonymTable = std::map<std::string, std::vector<SynonymEdit>>;
// inflected verb -> lemma.
using NegationTable = std::map<std::string, std::string>;

struct PerturbationPools {
  std::vector<std::string> adjectives;
  std::vector<std::string> clauses;
  SynonymTable synonyms;
  NegationTable negations;

  // Sections [adjectives], [clauses] and [negation] of a sectioned config,
  // plus an optional tab-separated synonym table.
  static PerturbationPools Load(const std::filesystem::path& pools_path,
                                const std::filesystem::path& synonyms_path);
};

enum class Target { kOccupation, kParticipant, kSubject };
enum class AdjectiveMode { kPreModifier, kRelativeClause };

struct PerturbationSpec {
  Operator op = Operator::kBaseline;
  std::vector<std::string> clause_pool;
  std::vector<std::string> adjective_pool;
  SynonymTable synonym_table;
  NegationTable verb_negation_table;
  Target target = Target::kOccupation;
  AdjectiveMode mode = AdjectiveMode::kPreModifier;

  static PerturbationSpec For(const ConstructionDescriptor& desc,
                              const PerturbationPools& pools);
  // Pools the operator references must be non-empty.
  void Validate() const;
};

SynonymTable ParseSynonymTable(std::string_view content,
                               const std::string& source_name);
SynonymTable LoadSynonymTable(const std::filesystem::path& path);
// Every span must occur verbatim in its template and every template id
// must exist.
void ValidateSynonymTable(const SynonymTable& table,
                          const std::vector<Template>& templates);

// Text-level primitives. `target` must occur exactly once as a whole word.
std::string InsertClauseAfter(std::string_view text, std::string_view target,
                              std::string_view clause);
std::string InsertAdjectiveAt(std::string_view text, std::string_view target,
                              std::string_view adjective, AdjectiveMode mode);

Instance InsertClause(const Instance& instance, std::string_view clause,
                      Target target);
// Applied to the subject of both premise and hypothesis.
PairInstance InsertClause(const PairInstance& pair, std::string_view clause);
Instance InsertAdjective(const Instance& instance, std::string_view adjective,
                         Target target, AdjectiveMode mode);
Instance SubstituteSynonyms(const Instance& instance,
                            const SynonymTable& table);
PairInstance NegateVerb(const PairInstance& pair, const NegationTable& table);

// round-half-up(proportion * n).
std::size_t SubsampleCount(double proportion, std::size_t n);
// Keeps the k occupations with the smallest FNV-1a(seed || word), in their
// original order. Other lists are unchanged.
Lexicon SubsampleLexicon(const Lexicon& lexicon, double proportion,
                         uint64_t seed);
std::vector<std::string> SubsampleWords(const std::vector<std::string>& words,
                                        double proportion, uint64_t seed);

}  // namespace bias_audit

#endif  // BIAS_AUDIT_PERTURBATION_H_
