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

// Instantiates templates into datasets. Every generator returns items sorted
// by id; alternate constructions are the baseline run through one
// perturbation operator (see perturbation.h).

#ifndef BIAS_AUDIT_CONSTRUCTION_H_
#define BIAS_AUDIT_CONSTRUCTION_H_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bias_audit/schema.h"

namespace bias_audit {

struct PerturbationPools;

enum class Benchmark { kWinogender, kBiasNli };

enum class Operator {
  kBaseline,
  kClauseOccupation,
  kClauseParticipant,
  kAdjPreOccupation,
  kAdjPostOccupation,
  kAdjPreParticipant,
  kAdjPostParticipant,
  kSynonyms,
  kNegation,
  kClauses,
  kSubsample,
};

std::string_view ToString(Benchmark b);
std::string_view ToString(Operator op);
Benchmark ParseBenchmark(std::string_view s);
Operator ParseOperator(std::string_view s);
Task TaskFor(Benchmark b);
// Operators in table order for a benchmark.
const std::vector<Operator>& OperatorsFor(Benchmark b);
bool IsValidFor(Benchmark b, Operator op);

// Shortest decimal that round-trips, e.g. 0.1 -> "0.1".
std::string FormatProportion(double p);

// Identifies the operator (and parameters) that produced a dataset variant.
struct ConstructionDescriptor {
  std::string id;
  Benchmark benchmark = Benchmark::kWinogender;
  Operator op = Operator::kBaseline;
  // Subsample: proportion, seed (per-trial), base_seed, trial.
  std::map<std::string, std::string> params;

  static ConstructionDescriptor ForOperator(Benchmark b, Operator op);
  static ConstructionDescriptor Subsample(Benchmark b, double proportion,
                                          uint64_t base_seed, uint64_t trial);

  void Validate() const;
  double proportion() const;
  uint64_t seed() const;
  uint64_t trial() const;

  bool operator==(const ConstructionDescriptor&) const = default;
};

// |templates| x (1 + |generic participants|) x 3 genders.
std::size_t WinogenderCount(const std::vector<Template>& templates,
                            const Lexicon& lexicon);
// Sum over templates of |occ| x |gendered| x |verbs|? x |objects|?, where a
// factor applies only if the template has that slot.
std::size_t BiasNliCount(const std::vector<Template>& templates,
                         const Lexicon& lexicon);

std::vector<Instance> GenerateWinogender(const std::vector<Template>& templates,
                                         const Lexicon& lexicon,
                                         const ConstructionDescriptor& desc,
                                         const PerturbationPools& pools);
std::vector<Instance> GenerateWinogender(const std::vector<Template>& templates,
                                         const Lexicon& lexicon,
                                         const ConstructionDescriptor& desc);

// Emits pairs in id order without holding realized text for the whole
// dataset: only (id, filler indices) keys are sorted in memory.
void StreamBiasNli(const std::vector<Template>& templates,
                   const Lexicon& lexicon, const ConstructionDescriptor& desc,
                   const PerturbationPools& pools,
                   const std::function<void(const PairInstance&)>& sink);
std::vector<PairInstance> GenerateBiasNli(const std::vector<Template>& templates,
                                          const Lexicon& lexicon,
                                          const ConstructionDescriptor& desc,
                                          const PerturbationPools& pools);
std::vector<PairInstance> GenerateBiasNli(const std::vector<Template>& templates,
                                          const Lexicon& lexicon,
                                          const ConstructionDescriptor& desc);

// Applies a construction to a baseline dataset. Results are re-keyed to the
// descriptor's construction id and sorted by id. Pool rotation is indexed by
// pair group rank (coref) or output position (nli), so the result equals
// generating that construction directly.
std::vector<Instance> ApplyConstruction(std::span<const Instance> baseline,
                                        const ConstructionDescriptor& desc,
                                        const PerturbationPools& pools);
std::vector<PairInstance> ApplyConstruction(
    std::span<const PairInstance> baseline, const ConstructionDescriptor& desc,
    const PerturbationPools& pools);

// `<text> Who does the word '<pronoun>' refer to? \n (a) <c0> (b) <c1>`
// with a literal backslash-n, the separator UnifiedQA-style models expect.
std::string ToQaPrompt(const Instance& instance);

}  // namespace bias_audit

#endif  // BIAS_AUDIT_CONSTRUCTION_H_
